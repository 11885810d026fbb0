// SPDX-License-Identifier: Apache-2.0
//
// Truncated bivariate power series, dense triangular storage.
#pragma once

#include <vector>

namespace revmap {

class Series2 {
public:
    explicit Series2(int degree = 0);

    int degree() const { return deg_; }
    // coefficient of x^i y^j; zero (read) or out-of-range (write) past the truncation
    double coeff(int i, int j) const;
    double& at(int i, int j);
    void set(int i, int j, double v) { at(i, j) = v; }

    double eval(double x, double y) const;
    double dx(double x, double y) const;
    double dy(double x, double y) const;

    Series2 operator+(const Series2& o) const;
    Series2 operator-(const Series2& o) const;
    Series2 operator*(double s) const;
    Series2 mul(const Series2& o) const; // truncated to this->degree()
    Series2 swapped() const;             // f(y, x)
    // f(u(x,y), v(x,y)); u and v should have no constant term
    Series2 compose(const Series2& u, const Series2& v) const;
    Series2 truncated(int degree) const;

    double max_abs() const;

    static Series2 x(int degree);
    static Series2 y(int degree);
    static Series2 constant(int degree, double c);

private:
    static int index(int i, int j) { return (i + j) * (i + j + 1) / 2 + j; }
    int deg_;
    std::vector<double> c_;
};

} // namespace revmap
