#include "cmcglue/regions.hpp"
#include "cmcglue/types.hpp"

#include <cmath>

namespace cmcglue {

RegionTable::RegionTable(double a, double b, double P, int l, bool is_edge, int ray_periods)
    : a_(a), b_(b), P_(P), R_(4.0 * P * (is_edge ? l : ray_periods)), l_(l), edge_(is_edge), periods_(ray_periods)
{
    if (!(b > 0.0 && a > 0.0))
        throw ValidationError("RegionTable: a and b must be positive");
    if (!(P > b))
        throw ValidationError("RegionTable: P_tau must exceed b (tau too large for this b)");
    if (l < 1 || ray_periods < 1)
        throw ValidationError("RegionTable: l must be positive");
}

void RegionTable::check(double x) const
{
    if (!(x >= 0.0 && x < P_ - b_))
        throw ValidationError("RegionTable: x, y must lie in [0, P - b)");
}

double RegionTable::map(End end, double t) const { return end == End::Plus ? t : R_ - t; }

Interval RegionTable::map(End end, double lo, double hi) const
{
    if (end == End::Plus)
        return {lo, hi};
    if (!edge_)
        throw ValidationError("RegionTable: rays have no minus end");
    return {R_ - hi, R_ - lo};
}

int RegionTable::max_standard(End end) const
{
    if (!edge_)
        return 2 * periods_ - 1;
    return end == End::Plus ? l_ : l_ - 1;
}

int RegionTable::max_transition(End end) const
{
    (void)end;
    return edge_ ? l_ : 2 * periods_ - 1;
}

int RegionTable::standard_count() const { return edge_ ? 2 * l_ - 1 : max_standard(End::Plus); }

Interval RegionTable::central(End end, double x) const
{
    check(x);
    return map(end, a_, b_ + x);
}

Interval RegionTable::central_extended(End end, double x) const
{
    check(x);
    return map(end, a_, 2.0 * P_ - (b_ + x));
}

Interval RegionTable::standard(End end, int n, double x) const
{
    check(x);
    if (n < 1 || n > max_standard(end))
        throw ValidationError("RegionTable: standard region label out of range");
    return map(end, 2.0 * n * P_ - (b_ + x), 2.0 * n * P_ + (b_ + x));
}

Interval RegionTable::extended_standard(End end, int n, double x) const
{
    check(x);
    if (n < 1 || n > max_standard(end))
        throw ValidationError("RegionTable: standard region label out of range");
    return map(end, (2.0 * n - 2.0) * P_ + (b_ + x), (2.0 * n + 2.0) * P_ - (b_ + x));
}

Interval RegionTable::transition(End end, int n, double x, double y) const
{
    check(x);
    check(y);
    if (n < 1 || n > max_transition(end))
        throw ValidationError("RegionTable: transition label out of range");
    return map(end, (2.0 * n - 2.0) * P_ + (b_ + x), 2.0 * n * P_ - (b_ + y));
}

double RegionTable::c_plus(End end, int n, double x) const
{
    check(x);
    if (n < 0 || n > max_transition(end) - 1)
        throw ValidationError("RegionTable: C+ label out of range");
    return map(end, 2.0 * n * P_ + (b_ + x));
}

double RegionTable::c_minus(End end, int n, double x) const
{
    check(x);
    if (n < 1 || n > max_transition(end))
        throw ValidationError("RegionTable: C- label out of range");
    return map(end, 2.0 * n * P_ - (b_ + x));
}

double RegionTable::c_middle(End end, int n) const
{
    if (n < 1 || n > max_transition(end))
        throw ValidationError("RegionTable: middle meridian label out of range");
    return map(end, (2.0 * n - 1.0) * P_);
}

RegionLabel RegionTable::label(double t) const
{
    End end = End::Plus;
    double s = t;
    if (edge_ && t > 0.5 * R_) {
        end = End::Minus;
        s = R_ - t;
    }
    if (s <= b_)
        return {RegionKind::Central, end, 0};
    const int n = static_cast<int>(std::lround(s / (2.0 * P_)));
    if (n >= 1 && std::abs(s - 2.0 * n * P_) <= b_) {
        if (edge_ && n == l_)
            return {RegionKind::Standard, End::Plus, n};
        return {RegionKind::Standard, end, n};
    }
    return {RegionKind::Transition, end, static_cast<int>(std::ceil(s / (2.0 * P_)))};
}

} // namespace cmcglue
