#pragma once

/// @file interval.hpp
/// @brief Interval arithmetic range analysis for expression trees.
///
/// Bounds are rounded outward only when an operation is inexact (detected
/// with error-free transformations), so affine maps of exact inputs keep
/// exact endpoints while every float evaluation inside the input box is
/// still enclosed.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "expression.hpp"

namespace pgp {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool pathological = false;

    static Interval point(double v) { return {v, v, false}; }
    static Interval bad() {
        return {-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(), true};
    }

    [[nodiscard]] bool contains(double v) const { return !pathological && lo <= v && v <= hi; }
    [[nodiscard]] bool contains_zero() const { return lo <= 0.0 && 0.0 <= hi; }
    [[nodiscard]] bool bounded() const { return std::isfinite(lo) && std::isfinite(hi); }
    [[nodiscard]] double width() const { return hi - lo; }

    friend bool operator==(const Interval&, const Interval&) = default;
};

namespace detail {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline double down(double v) { return std::nextafter(v, -kInf); }
inline double up(double v) { return std::nextafter(v, kInf); }

// Knuth two-sum: exact rounding error of a + b.
inline double sum_error(double a, double b, double s) {
    const double bb = s - a;
    return (a - (s - bb)) + (b - bb);
}

inline double add_lo(double a, double b) {
    const double s = a + b;
    if (!std::isfinite(s)) return s;
    return sum_error(a, b, s) < 0.0 ? down(s) : s;
}
inline double add_hi(double a, double b) {
    const double s = a + b;
    if (!std::isfinite(s)) return s;
    return sum_error(a, b, s) > 0.0 ? up(s) : s;
}

inline double mul_lo(double a, double b) {
    const double p = a * b;
    if (!std::isfinite(p)) return p;
    return std::fma(a, b, -p) < 0.0 ? down(p) : p;
}
inline double mul_hi(double a, double b) {
    const double p = a * b;
    if (!std::isfinite(p)) return p;
    return std::fma(a, b, -p) > 0.0 ? up(p) : p;
}

// Sign of (a / b - q) equals sign of (a - q*b) / b.
inline double div_lo(double a, double b) {
    const double q = a / b;
    if (!std::isfinite(q)) return q;
    const double r = std::fma(-q, b, a);
    return (r != 0.0 && (r < 0.0) != (b < 0.0)) ? down(q) : q;
}
inline double div_hi(double a, double b) {
    const double q = a / b;
    if (!std::isfinite(q)) return q;
    const double r = std::fma(-q, b, a);
    return (r != 0.0 && (r > 0.0) != (b < 0.0)) ? up(q) : q;
}

inline double sqrt_lo(double a) {
    const double s = std::sqrt(a);
    return std::fma(-s, s, a) < 0.0 ? down(s) : s;
}
inline double sqrt_hi(double a) {
    const double s = std::sqrt(a);
    return std::fma(-s, s, a) > 0.0 ? up(s) : s;
}

inline Interval finish(Interval r) {
    if (r.pathological || !r.bounded() || std::isnan(r.lo) || std::isnan(r.hi)) return Interval::bad();
    return r;
}

inline Interval iadd(const Interval& a, const Interval& b) {
    return finish({add_lo(a.lo, b.lo), add_hi(a.hi, b.hi), false});
}
inline Interval isub(const Interval& a, const Interval& b) {
    return finish({add_lo(a.lo, -b.hi), add_hi(a.hi, -b.lo), false});
}
inline Interval imul(const Interval& a, const Interval& b) {
    const double lo = std::min({mul_lo(a.lo, b.lo), mul_lo(a.lo, b.hi), mul_lo(a.hi, b.lo), mul_lo(a.hi, b.hi)});
    const double hi = std::max({mul_hi(a.lo, b.lo), mul_hi(a.lo, b.hi), mul_hi(a.hi, b.lo), mul_hi(a.hi, b.hi)});
    return finish({lo, hi, false});
}
inline Interval idiv(const Interval& a, const Interval& b) {
    if (b.contains_zero()) return Interval::bad();
    const double lo = std::min({div_lo(a.lo, b.lo), div_lo(a.lo, b.hi), div_lo(a.hi, b.lo), div_lo(a.hi, b.hi)});
    const double hi = std::max({div_hi(a.lo, b.lo), div_hi(a.lo, b.hi), div_hi(a.hi, b.lo), div_hi(a.hi, b.hi)});
    return finish({lo, hi, false});
}
inline Interval isquare(const Interval& a) {
    if (a.lo >= 0.0) return finish({mul_lo(a.lo, a.lo), mul_hi(a.hi, a.hi), false});
    if (a.hi <= 0.0) return finish({mul_lo(a.hi, a.hi), mul_hi(a.lo, a.lo), false});
    return finish({0.0, std::max(mul_hi(a.lo, a.lo), mul_hi(a.hi, a.hi)), false});
}
inline Interval isqrt(const Interval& a) {
    if (a.lo < 0.0) return Interval::bad();
    return finish({sqrt_lo(a.lo), sqrt_hi(a.hi), false});
}

inline Interval interval_at(const Tree& t, std::size_t& i, std::span<const Interval> ranges) {
    const Node& n = t[i++];
    if (n.op == Op::Constant) return Interval::point(n.value);
    if (n.op == Op::Variable) {
        const auto& r = ranges[n.var];
        return (r.pathological || !r.bounded() || r.lo > r.hi) ? Interval::bad() : r;
    }
    Interval args[kMaxVariadicArity];
    bool bad = false;
    for (std::uint8_t k = 0; k < n.arity; ++k) {
        args[k] = interval_at(t, i, ranges);
        bad = bad || args[k].pathological;
    }
    if (bad) return Interval::bad();
    switch (n.op) {
    case Op::Plus: {
        Interval acc = args[0];
        for (std::uint8_t k = 1; k < n.arity && !acc.pathological; ++k) acc = iadd(acc, args[k]);
        return acc;
    }
    case Op::Times: {
        Interval acc = args[0];
        for (std::uint8_t k = 1; k < n.arity && !acc.pathological; ++k) acc = imul(acc, args[k]);
        return acc;
    }
    case Op::Minus: return {-args[0].hi, -args[0].lo, false};
    case Op::Subtract: return isub(args[0], args[1]);
    case Op::Divide: return idiv(args[0], args[1]);
    case Op::Inverse: return idiv(Interval::point(1.0), args[0]);
    case Op::Sqrt: return isqrt(args[0]);
    case Op::Square: return isquare(args[0]);
    default: return Interval::bad();
    }
}

}  // namespace detail

/// Propagates per-variable input ranges through `t`. The result is flagged
/// pathological when any subexpression divides by (or inverts) an interval
/// containing zero, takes the square root of an interval reaching below zero,
/// or produces an unbounded endpoint.
inline Interval interval_eval(const Tree& t, std::span<const Interval> ranges) {
    if (max_variable_index(t) > ranges.size())
        throw InputError("interval_eval: missing range for variable index " +
                         std::to_string(max_variable_index(t) - 1));
    std::size_t i = 0;
    return detail::interval_at(t, i, ranges);
}

}  // namespace pgp
