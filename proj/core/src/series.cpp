// SPDX-License-Identifier: Apache-2.0
#include "revmap/series.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace revmap {

Series2::Series2(int degree) : deg_(degree), c_((degree + 1) * (degree + 2) / 2, 0.0) {
    if (degree < 0) throw std::invalid_argument("Series2: negative degree");
}

double Series2::coeff(int i, int j) const {
    if (i < 0 || j < 0 || i + j > deg_) return 0.0;
    return c_[index(i, j)];
}

double& Series2::at(int i, int j) {
    if (i < 0 || j < 0 || i + j > deg_) throw std::out_of_range("Series2::at");
    return c_[index(i, j)];
}

double Series2::eval(double x, double y) const {
    double s = 0.0;
    double xi = 1.0;
    for (int i = 0; i <= deg_; ++i, xi *= x) {
        double yj = 1.0;
        for (int j = 0; i + j <= deg_; ++j, yj *= y) s += c_[index(i, j)] * xi * yj;
    }
    return s;
}

double Series2::dx(double x, double y) const {
    double s = 0.0;
    for (int i = 1; i <= deg_; ++i)
        for (int j = 0; i + j <= deg_; ++j)
            s += i * c_[index(i, j)] * std::pow(x, i - 1) * std::pow(y, j);
    return s;
}

double Series2::dy(double x, double y) const {
    double s = 0.0;
    for (int i = 0; i <= deg_; ++i)
        for (int j = 1; i + j <= deg_; ++j)
            s += j * c_[index(i, j)] * std::pow(x, i) * std::pow(y, j - 1);
    return s;
}

Series2 Series2::operator+(const Series2& o) const {
    Series2 r(std::max(deg_, o.deg_));
    for (int i = 0; i <= r.deg_; ++i)
        for (int j = 0; i + j <= r.deg_; ++j) r.at(i, j) = coeff(i, j) + o.coeff(i, j);
    return r;
}

Series2 Series2::operator-(const Series2& o) const { return *this + o * -1.0; }

Series2 Series2::operator*(double s) const {
    Series2 r = *this;
    for (auto& v : r.c_) v *= s;
    return r;
}

Series2 Series2::mul(const Series2& o) const {
    Series2 r(deg_);
    for (int i = 0; i <= deg_; ++i)
        for (int j = 0; i + j <= deg_; ++j) {
            double a = c_[index(i, j)];
            if (a == 0.0) continue;
            for (int k = 0; i + j + k <= deg_; ++k)
                for (int l = 0; i + j + k + l <= deg_; ++l)
                    r.at(i + k, j + l) += a * o.coeff(k, l);
        }
    return r;
}

Series2 Series2::swapped() const {
    Series2 r(deg_);
    for (int i = 0; i <= deg_; ++i)
        for (int j = 0; i + j <= deg_; ++j) r.at(j, i) = c_[index(i, j)];
    return r;
}

Series2 Series2::compose(const Series2& u, const Series2& v) const {
    // Horner-free power tables; fine for the low degrees used here
    Series2 r(deg_);
    std::vector<Series2> up{constant(deg_, 1.0)}, vp{constant(deg_, 1.0)};
    for (int n = 1; n <= deg_; ++n) {
        up.push_back(up.back().mul(u.truncated(deg_)));
        vp.push_back(vp.back().mul(v.truncated(deg_)));
    }
    for (int i = 0; i <= deg_; ++i)
        for (int j = 0; i + j <= deg_; ++j) {
            double a = c_[index(i, j)];
            if (a != 0.0) r = r + up[i].mul(vp[j]) * a;
        }
    return r;
}

Series2 Series2::truncated(int degree) const {
    Series2 r(degree);
    for (int i = 0; i <= degree; ++i)
        for (int j = 0; i + j <= degree; ++j) r.at(i, j) = coeff(i, j);
    return r;
}

double Series2::max_abs() const {
    double m = 0.0;
    for (double v : c_) m = std::max(m, std::abs(v));
    return m;
}

Series2 Series2::x(int degree) {
    Series2 r(degree);
    if (degree >= 1) r.at(1, 0) = 1.0;
    return r;
}

Series2 Series2::y(int degree) {
    Series2 r(degree);
    if (degree >= 1) r.at(0, 1) = 1.0;
    return r;
}

Series2 Series2::constant(int degree, double c) {
    Series2 r(degree);
    r.at(0, 0) = c;
    return r;
}

} // namespace revmap
