#pragma once


namespace cmcglue {

// Frozen region constant for the spectral analysis: 4 tau cosh(2 w(b)) = 0.05 at tau = 1e-3.
inline constexpr double kSpectralB = 2.533622073062728;
inline constexpr double kEpsilon1 = 0.05;

struct Interval
{
    double lo;
    double hi;

    double length() const { return hi - lo; }
    bool contains(double t) const { return t >= lo && t <= hi; }
};

enum class End { Plus, Minus };

enum class RegionKind { Central, Standard, Transition };

struct RegionLabel
{
    RegionKind kind;
    End end;
    int n; // 0 for the central region
};

// Parameter-domain intervals of the standard, extended and transition regions on one block M[e].
// For an edge the minus-end regions are the mirror images t -> R - t.
class RegionTable
{
public:
    // P is the domain quarter period, R = 4 P l; rays have no minus end.
    RegionTable(double a, double b, double P, int l, bool is_edge, int ray_periods = 6);

    double a() const { return a_; }
    double b() const { return b_; }
    double P() const { return P_; }
    double R() const { return R_; }
    int l() const { return l_; }
    bool is_edge() const { return edge_; }

    // Highest standard-region label at an end: l at p+, l - 1 at p- (edges), ray_periods * 2 - 1 for rays.
    int max_standard(End end) const;
    int max_transition(End end) const;
    int standard_count() const;

    Interval central(End end, double x = 0.0) const;          // collar part of S_x[p]
    Interval central_extended(End end, double x = 0.0) const; // collar part of S~_x[p]
    Interval standard(End end, int n, double x = 0.0) const;
    Interval extended_standard(End end, int n, double x = 0.0) const;
    Interval transition(End end, int n, double x = 0.0, double y = 0.0) const;
    double c_plus(End end, int n, double x = 0.0) const;
    double c_minus(End end, int n, double x = 0.0) const;
    double c_middle(End end, int n) const;

    // Region containing t; points on a shared boundary go to the standard side.
    RegionLabel label(double t) const;

private:
    double a_, b_, P_, R_;
    int l_;
    bool edge_;
    int periods_;

    Interval map(End end, double lo, double hi) const;
    double map(End end, double t) const;
    void check(double x) const;
};

} // namespace cmcglue
