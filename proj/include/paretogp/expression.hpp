#pragma once

/// @file expression.hpp
/// @brief Expression trees over the arithmetic primitive set used by the
/// symbolic-regression engine.
///
/// A tree is stored as a flat prefix-order node array. Every subtree occupies
/// a contiguous index range, so variation operators are array splices and
/// evaluation is a single reverse sweep.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pgp {

/// Raised on malformed caller input (bad shapes, out-of-range indices, bad files).
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Op : std::uint8_t {
    Plus,      // variadic sum
    Minus,     // unary negation
    Subtract,  // a - b
    Divide,    // a / b
    Times,     // variadic product
    Sqrt,
    Square,
    Inverse,   // 1 / a
    Variable,
    Constant,
};

inline constexpr std::size_t kMaxVariadicArity = 5;

inline constexpr std::array<Op, 8> kPrimitives = {Op::Plus,  Op::Minus, Op::Subtract, Op::Divide,
                                                  Op::Times, Op::Sqrt,  Op::Square,   Op::Inverse};

constexpr bool is_leaf(Op op) noexcept { return op == Op::Variable || op == Op::Constant; }
constexpr bool is_variadic(Op op) noexcept { return op == Op::Plus || op == Op::Times; }
constexpr bool is_unary(Op op) noexcept {
    return op == Op::Minus || op == Op::Sqrt || op == Op::Square || op == Op::Inverse;
}
constexpr bool is_binary(Op op) noexcept { return op == Op::Subtract || op == Op::Divide; }

constexpr const char* op_name(Op op) noexcept {
    switch (op) {
    case Op::Plus: return "Plus";
    case Op::Minus: return "Minus";
    case Op::Subtract: return "Subtract";
    case Op::Divide: return "Divide";
    case Op::Times: return "Times";
    case Op::Sqrt: return "Sqrt";
    case Op::Square: return "Square";
    case Op::Inverse: return "Inverse";
    case Op::Variable: return "Variable";
    case Op::Constant: return "Constant";
    }
    return "?";
}

struct Node {
    Op op = Op::Constant;
    std::uint8_t arity = 0;
    std::uint32_t var = 0;  // Variable only
    double value = 0.0;     // Constant only

    friend bool operator==(const Node&, const Node&) = default;
};

class Tree {
public:
    Tree() = default;
    explicit Tree(std::vector<Node> prefix) : nodes_(std::move(prefix)) {}

    static Tree variable(std::uint32_t index) { return Tree({Node{Op::Variable, 0, index, 0.0}}); }
    static Tree constant(double v) { return Tree({Node{Op::Constant, 0, 0, v}}); }

    /// Builds an operator node over already-built children. Arity is checked
    /// against the operator; a variadic node may carry a single child only
    /// when it is the template root (see is_valid()).
    static Tree make(Op op, std::vector<Tree> children) {
        if (is_leaf(op)) throw std::invalid_argument("Tree::make: leaf op");
        const auto n = children.size();
        if ((is_unary(op) && n != 1) || (is_binary(op) && n != 2) ||
            (is_variadic(op) && (n < 1 || n > kMaxVariadicArity))) {
            throw std::invalid_argument(std::string("Tree::make: bad arity for ") + op_name(op));
        }
        std::vector<Node> nodes;
        std::size_t total = 1;
        for (const auto& c : children) total += c.size();
        nodes.reserve(total);
        nodes.push_back(Node{op, static_cast<std::uint8_t>(n), 0, 0.0});
        for (const auto& c : children) nodes.insert(nodes.end(), c.nodes_.begin(), c.nodes_.end());
        return Tree(std::move(nodes));
    }

    [[nodiscard]] std::size_t size() const noexcept { return nodes_.size(); }
    [[nodiscard]] bool empty() const noexcept { return nodes_.empty(); }
    [[nodiscard]] const Node& operator[](std::size_t i) const { return nodes_[i]; }
    [[nodiscard]] std::span<const Node> nodes() const noexcept { return nodes_; }
    [[nodiscard]] const Node& root() const { return nodes_.front(); }

    /// One past the last node of the subtree rooted at `i`.
    [[nodiscard]] std::size_t subtree_end(std::size_t i) const {
        std::size_t need = 1;
        std::size_t j = i;
        while (need > 0) {
            need += nodes_[j].arity;
            --need;
            ++j;
        }
        return j;
    }

    [[nodiscard]] Tree subtree(std::size_t i) const {
        return Tree(std::vector<Node>(nodes_.begin() + static_cast<std::ptrdiff_t>(i),
                                      nodes_.begin() + static_cast<std::ptrdiff_t>(subtree_end(i))));
    }

    /// Copy of this tree with the subtree at `i` replaced by `donor`.
    [[nodiscard]] Tree replace_subtree(std::size_t i, const Tree& donor) const {
        const auto end = subtree_end(i);
        std::vector<Node> out;
        out.reserve(nodes_.size() - (end - i) + donor.size());
        out.insert(out.end(), nodes_.begin(), nodes_.begin() + static_cast<std::ptrdiff_t>(i));
        out.insert(out.end(), donor.nodes_.begin(), donor.nodes_.end());
        out.insert(out.end(), nodes_.begin() + static_cast<std::ptrdiff_t>(end), nodes_.end());
        return Tree(std::move(out));
    }

    /// Indices of the direct children of node `i`.
    [[nodiscard]] std::vector<std::size_t> children(std::size_t i) const {
        std::vector<std::size_t> out;
        out.reserve(nodes_[i].arity);
        std::size_t c = i + 1;
        for (std::uint8_t k = 0; k < nodes_[i].arity; ++k) {
            out.push_back(c);
            c = subtree_end(c);
        }
        return out;
    }

    friend bool operator==(const Tree&, const Tree&) = default;

private:
    std::vector<Node> nodes_;
};

/// Structural check: arities match operators, the node array is exactly one
/// tree, and a single-child Plus/Times appears only at the root.
inline bool is_valid(const Tree& t) {
    if (t.empty()) return false;
    std::size_t need = 1;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (need == 0) return false;
        const auto& n = t[i];
        if (is_leaf(n.op) && n.arity != 0) return false;
        if (is_unary(n.op) && n.arity != 1) return false;
        if (is_binary(n.op) && n.arity != 2) return false;
        if (is_variadic(n.op)) {
            const std::size_t lo = (i == 0) ? 1 : 2;
            if (n.arity < lo || n.arity > kMaxVariadicArity) return false;
        }
        if (n.op == Op::Constant && !std::isfinite(n.value)) return false;
        need = need - 1 + n.arity;
    }
    return need == 0;
}

/// Sum over every node of the size of the subtree rooted there; equivalently
/// the sum over nodes of (depth + 1).
inline std::size_t complexity(const Tree& t) {
    std::size_t total = 0;
    std::vector<std::uint8_t> pending;
    for (const auto& n : t.nodes()) {
        total += pending.size() + 1;
        if (n.arity > 0) {
            pending.push_back(n.arity);
        } else {
            while (!pending.empty() && --pending.back() == 0) pending.pop_back();
        }
    }
    return total;
}

/// Depth of the subtree rooted at `i`; a leaf has depth 1.
inline std::size_t depth(const Tree& t, std::size_t i = 0) {
    std::size_t best = 0;
    std::vector<std::pair<std::uint8_t, std::size_t>> pending;  // remaining children, depth
    const auto end = t.subtree_end(i);
    for (std::size_t j = i; j < end; ++j) {
        const std::size_t d = pending.size() + 1;
        best = std::max(best, d);
        if (t[j].arity > 0) {
            pending.emplace_back(t[j].arity, d);
        } else {
            while (!pending.empty() && --pending.back().first == 0) pending.pop_back();
        }
    }
    return best;
}

inline std::set<std::uint32_t> variables_used(const Tree& t) {
    std::set<std::uint32_t> out;
    for (const auto& n : t.nodes())
        if (n.op == Op::Variable) out.insert(n.var);
    return out;
}

inline std::size_t max_variable_index(const Tree& t) {
    std::size_t m = 0;
    for (const auto& n : t.nodes())
        if (n.op == Op::Variable) m = std::max<std::size_t>(m, n.var + 1);
    return m;  // number of columns required
}

namespace detail {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

inline double apply_scalar(Op op, std::span<const double> a) {
    switch (op) {
    case Op::Plus: return std::accumulate(a.begin(), a.end(), 0.0);
    case Op::Times: {
        double p = 1.0;
        for (double v : a) p *= v;
        return p;
    }
    case Op::Minus: return -a[0];
    case Op::Subtract: return a[0] - a[1];
    case Op::Divide: return a[1] == 0.0 ? kNaN : a[0] / a[1];
    case Op::Sqrt: return a[0] < 0.0 ? kNaN : std::sqrt(a[0]);
    case Op::Square: return a[0] * a[0];
    case Op::Inverse: return a[0] == 0.0 ? kNaN : 1.0 / a[0];
    default: return kNaN;
    }
}

inline double eval_at(const Tree& t, std::size_t& i, std::span<const double> row) {
    const Node& n = t[i++];
    if (n.op == Op::Constant) return n.value;
    if (n.op == Op::Variable) return row[n.var];
    double args[kMaxVariadicArity];
    for (std::uint8_t k = 0; k < n.arity; ++k) args[k] = eval_at(t, i, row);
    return apply_scalar(n.op, std::span<const double>(args, n.arity));
}

}  // namespace detail

/// Evaluates `t` at a single input row. Singularities (division by zero,
/// square root of a negative) yield NaN, which propagates.
inline double evaluate(const Tree& t, std::span<const double> row) {
    if (max_variable_index(t) > row.size())
        throw InputError("evaluate: row has " + std::to_string(row.size()) +
                         " values but tree references variable index " +
                         std::to_string(max_variable_index(t) - 1));
    std::size_t i = 0;
    return detail::eval_at(t, i, row);
}

/// Column-wise evaluator reusing scratch buffers across calls. Not thread
/// safe; use one instance per thread.
class BatchEvaluator {
public:
    /// `columns[v]` holds variable v for every row; all columns share length `rows`.
    std::vector<double> operator()(const Tree& t, std::span<const std::vector<double>> columns,
                                   std::size_t rows) {
        if (max_variable_index(t) > columns.size())
            throw InputError("evaluate: tree references variable index " +
                             std::to_string(max_variable_index(t) - 1) + " but only " +
                             std::to_string(columns.size()) + " columns are available");
        stack_.clear();
        for (std::size_t idx = t.size(); idx-- > 0;) {
            const Node& n = t[idx];
            auto buf = acquire(rows);
            if (n.op == Op::Constant) {
                std::fill(buf.begin(), buf.end(), n.value);
            } else if (n.op == Op::Variable) {
                std::copy_n(columns[n.var].begin(), rows, buf.begin());
            } else {
                // After a reverse sweep the first child sits on top of the stack.
                const std::size_t k = n.arity;
                const std::size_t base = stack_.size() - k;
                auto arg = [&](std::size_t c) -> const std::vector<double>& {
                    return stack_[stack_.size() - 1 - c];
                };
                switch (n.op) {
                case Op::Plus:
                    buf = arg(0);
                    for (std::size_t c = 1; c < k; ++c) {
                        const auto& a = arg(c);
                        for (std::size_t r = 0; r < rows; ++r) buf[r] += a[r];
                    }
                    break;
                case Op::Times:
                    buf = arg(0);
                    for (std::size_t c = 1; c < k; ++c) {
                        const auto& a = arg(c);
                        for (std::size_t r = 0; r < rows; ++r) buf[r] *= a[r];
                    }
                    break;
                default: {
                    const auto& a = arg(0);
                    const std::vector<double>* b = k > 1 ? &arg(1) : nullptr;
                    for (std::size_t r = 0; r < rows; ++r) {
                        double in[2] = {a[r], b ? (*b)[r] : 0.0};
                        buf[r] = detail::apply_scalar(n.op, std::span<const double>(in, k));
                    }
                }
                }
                for (std::size_t c = 0; c < k; ++c) release(std::move(stack_[base + c]));
                stack_.resize(base);
            }
            stack_.push_back(std::move(buf));
        }
        auto out = std::move(stack_.back());
        stack_.clear();
        return out;
    }

private:
    std::vector<double> acquire(std::size_t rows) {
        if (pool_.empty()) return std::vector<double>(rows);
        auto v = std::move(pool_.back());
        pool_.pop_back();
        v.resize(rows);
        return v;
    }
    void release(std::vector<double>&& v) { pool_.push_back(std::move(v)); }

    std::vector<std::vector<double>> stack_;
    std::vector<std::vector<double>> pool_;
};

}  // namespace pgp
