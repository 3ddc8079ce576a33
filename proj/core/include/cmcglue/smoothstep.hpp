#pragma once

#include <vector>

namespace cmcglue {

// Smooth step: 0 on (-inf,-1], 1 on [1,inf), Psi(s) - 1/2 odd.
double Psi(double s);
double Psi_prime(double s);
double Psi_second(double s);

// psi[a,b] = Psi o L with L affine, L(a) = -3, L(b) = 3.
double psi(double a, double b, double x);
double psi_prime(double a, double b, double x);
double psi_second(double a, double b, double x);

struct Cutoff
{
    double a;
    double b;

    Cutoff(double a_, double b_);
    double operator()(double x) const { return psi(a, b, x); }
    double derivative(double x) const { return psi_prime(a, b, x); }
};

// Samples f(t_i) on a uniform grid t_i = t0 + i*h.
struct Field1D
{
    double h = 1.0;
    std::vector<double> values;
};

// Samples on a uniform (t, theta) grid, theta periodic with nth points on [0, 2pi).
struct Field2D
{
    int nt = 0;
    int nth = 0;
    double ht = 1.0;
    double hth = 1.0;
    std::vector<double> values; // index it*nth + ith

    double at(int it, int ith) const { return values[static_cast<size_t>(it) * nth + ith]; }
};

// sup over grid of (1/f) * sum_{j<=k} scale^j |D^j u|, D^j central differences.
double discrete_norm(const Field1D& u, int k, const std::vector<double>& weight, double scale);
double discrete_norm(const Field2D& u, int k, const std::vector<double>& weight, double scale);

} // namespace cmcglue
