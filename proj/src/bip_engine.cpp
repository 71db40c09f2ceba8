#include "kepro/bip_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <set>

namespace kepro {

namespace {

constexpr int kAtLower = 0;
constexpr int kAtUpper = 1;
constexpr int kBasic = 2;

// ----------------------------------------------------------------------
// Bounded-variable primal simplex on a dense tableau, templated on the
// number type. double runs fast with tolerances; Rational runs exactly
// with Bland's rule. Column layout: [structural | slacks | artificials].
// ----------------------------------------------------------------------

template <typename Num>
struct SimplexTraits;

template <>
struct SimplexTraits<double> {
    static constexpr bool exact = false;
    static double tol() { return 1e-9; }
    static double feas_tol() { return 1e-7; }
};

template <>
struct SimplexTraits<Rational> {
    static constexpr bool exact = true;
    static Rational tol() { return 0; }
    static Rational feas_tol() { return 0; }
};

enum class SimplexEnd { Optimal, Infeasible, Failed };

template <typename Num>
class Simplex {
public:
    int m = 0;            // rows
    int n_struct = 0;     // structural variables
    int art_start = 0;    // first artificial column
    int cols = 0;

    std::vector<std::vector<Num>> T;  // m x cols tableau (B^-1 A)
    std::vector<Num> beta;            // basic variable values
    std::vector<Num> d;               // reduced-cost row
    std::vector<int> basis;           // variable per row
    std::vector<int> vstat;           // per variable
    std::vector<Num> lo, hi;
    std::vector<char> lo_inf, hi_inf;
    std::vector<char> banned;         // artificials after phase 1
    std::vector<int> art_sign;        // per row: 0 none, else +-1
    long long pivots = 0;
    bool bland = false;
    bool failed = false;

    Num value_of(int j) const { return vstat[j] == kAtLower ? lo[j] : hi[j]; }

    static bool is_zero(const Num& v) {
        if constexpr (SimplexTraits<Num>::exact) {
            return v == 0;
        } else {
            return std::fabs(v) <= SimplexTraits<Num>::tol();
        }
    }
    static bool is_pos(const Num& v) {
        if constexpr (SimplexTraits<Num>::exact) {
            return v > 0;
        } else {
            return v > SimplexTraits<Num>::tol();
        }
    }

    // Builds the tableau for rows sum(a x) + s = b with per-variable boxes;
    // rows whose initial slack value violates its box receive an artificial.
    void build(const BinaryProgram& p, const std::vector<int>& fixed) {
        n_struct = p.num_vars;
        m = static_cast<int>(p.constraints.size());
        art_start = n_struct + m;
        cols = art_start;

        lo.assign(cols, Num(0));
        hi.assign(cols, Num(1));
        lo_inf.assign(cols, 0);
        hi_inf.assign(cols, 0);
        vstat.assign(cols, kAtLower);
        banned.assign(cols, 0);
        art_sign.assign(m, 0);

        for (int j = 0; j < n_struct; ++j) {
            if (!fixed.empty() && fixed[j] >= 0) {
                lo[j] = Num(fixed[j]);
                hi[j] = Num(fixed[j]);
            }
        }
        for (int i = 0; i < m; ++i) {
            const int s = n_struct + i;
            switch (p.constraints[i].sense) {
                case SparseRow::Sense::Le:
                    lo[s] = Num(0);
                    hi_inf[s] = 1;
                    break;
                case SparseRow::Sense::Ge:
                    lo_inf[s] = 1;
                    hi[s] = Num(0);
                    vstat[s] = kAtUpper;
                    break;
                case SparseRow::Sense::Eq:
                    lo[s] = Num(0);
                    hi[s] = Num(0);
                    break;
            }
        }

        T.assign(m, std::vector<Num>(cols, Num(0)));
        beta.assign(m, Num(0));
        basis.assign(m, -1);

        for (int i = 0; i < m; ++i) {
            for (const auto& [j, coeff] : p.constraints[i].terms) {
                T[i][j] += Num(coeff);
            }
            T[i][n_struct + i] = Num(1);
        }

        // Initial basis: slack where feasible, artificial otherwise.
        for (int i = 0; i < m; ++i) {
            const int s = n_struct + i;
            Num residual = Num(p.constraints[i].rhs);
            for (int j = 0; j < n_struct; ++j) {
                if (!is_zero(T[i][j])) residual -= T[i][j] * value_of(j);
            }
            const bool below = !lo_inf[s] && residual < lo[s];
            const bool above = !hi_inf[s] && residual > hi[s];
            if (!below && !above) {
                basis[i] = s;
                vstat[s] = kBasic;
                beta[i] = residual;
                continue;
            }
            // Clamp the slack to its violated side and make an artificial
            // basic with the (positive) remaining violation.
            const Num s_val = above ? hi[s] : lo[s];
            vstat[s] = above ? kAtUpper : kAtLower;
            const int sign = residual - s_val > 0 ? 1 : -1;
            if (sign < 0) {
                for (auto& entry : T[i]) entry = -entry;
            }
            const int a = cols;
            for (int r = 0; r < m; ++r) T[r].push_back(Num(r == i ? 1 : 0));
            lo.push_back(Num(0));
            hi.push_back(Num(0));
            lo_inf.push_back(0);
            hi_inf.push_back(1);  // [0, inf) during phase 1
            vstat.push_back(kBasic);
            banned.push_back(0);
            ++cols;
            art_sign[i] = sign;
            basis[i] = a;
            beta[i] = (residual - s_val) * Num(sign);
        }
        d.assign(cols, Num(0));
    }

    bool has_artificials() const { return cols > art_start; }

    // Installs reduced costs and objective value for cost vector c (length
    // cols, zero beyond what the caller fills).
    Num install_costs(const std::vector<Num>& c) {
        d = c;
        d.resize(cols, Num(0));
        Num obj(0);
        for (int j = 0; j < cols; ++j) {
            if (vstat[j] != kBasic && !is_zero(d[j])) obj += d[j] * value_of(j);
        }
        for (int i = 0; i < m; ++i) {
            const Num cb = d[basis[i]];
            if (is_zero(cb)) continue;
            obj += cb * beta[i];
            for (int j = 0; j < cols; ++j) {
                if (!is_zero(T[i][j])) d[j] -= cb * T[i][j];
            }
            d[basis[i]] = Num(0);
        }
        return obj;
    }

    // One simplex phase: pivots until no entering candidate remains.
    SimplexEnd iterate(Num& obj, const Deadline& deadline, long long pivot_cap) {
        const long long start_pivots = pivots;
        long long stall = 0;
        while (true) {
            if (((pivots - start_pivots) & 63) == 0 && deadline.expired()) {
                return SimplexEnd::Failed;
            }
            if (pivots - start_pivots > pivot_cap) return SimplexEnd::Failed;

            // Entering variable: improving reduced cost at a movable bound.
            int enter = -1;
            Num best_score(0);
            for (int j = 0; j < cols; ++j) {
                if (vstat[j] == kBasic || banned[j]) continue;
                if (!lo_inf[j] && !hi_inf[j] && lo[j] == hi[j]) continue;
                Num score(0);
                if (vstat[j] == kAtLower && is_pos(d[j])) score = d[j];
                else if (vstat[j] == kAtUpper && is_pos(Num(-d[j]))) score = -d[j];
                else continue;
                if (bland || SimplexTraits<Num>::exact) {
                    enter = j;
                    break;
                }
                if (enter < 0 || score > best_score) {
                    enter = j;
                    best_score = score;
                }
            }
            if (enter < 0) return SimplexEnd::Optimal;

            const int dir = vstat[enter] == kAtLower ? 1 : -1;

            // Ratio test; the entering variable's own span caps the step.
            bool step_finite = !lo_inf[enter] && !hi_inf[enter];
            Num step = step_finite ? hi[enter] - lo[enter] : Num(0);
            int leave_row = -1;
            int leave_side = kAtLower;
            for (int i = 0; i < m; ++i) {
                const Num& a = T[i][enter];
                if (is_zero(a)) continue;
                const Num down = Num(dir) * a;  // beta falls at this rate
                const int v = basis[i];
                Num room;
                int side;
                if (is_pos(down)) {
                    if (lo_inf[v]) continue;
                    room = beta[i] - lo[v];
                    side = kAtLower;
                } else {
                    if (hi_inf[v]) continue;
                    room = hi[v] - beta[i];
                    side = kAtUpper;
                }
                if (room < 0) room = Num(0);  // numerical guard
                const Num rate = is_pos(down) ? down : -down;
                const Num ratio = room / rate;
                bool take = false;
                if (!step_finite || ratio < step) {
                    take = true;
                } else if (ratio == step && leave_row >= 0 &&
                           basis[i] < basis[leave_row]) {
                    take = true;  // Bland tie-break on the leaving variable
                }
                if (take) {
                    step = ratio;
                    step_finite = true;
                    leave_row = i;
                    leave_side = side;
                }
            }
            if (!step_finite) return SimplexEnd::Failed;  // unbounded: numeric trouble

            if (is_zero(step)) {
                ++stall;
                if (!SimplexTraits<Num>::exact && stall > 2000 && !bland) bland = true;
                if (stall > 20000 + 50LL * (m + cols)) return SimplexEnd::Failed;
            } else {
                stall = 0;
            }

            obj += d[enter] * Num(dir) * step;
            if (leave_row < 0) {
                // Bound flip.
                for (int i = 0; i < m; ++i) {
                    if (!is_zero(T[i][enter])) {
                        beta[i] -= Num(dir) * T[i][enter] * step;
                    }
                }
                vstat[enter] = vstat[enter] == kAtLower ? kAtUpper : kAtLower;
                ++pivots;
                continue;
            }

            const Num enter_val = value_of(enter) + Num(dir) * step;
            for (int i = 0; i < m; ++i) {
                if (i != leave_row && !is_zero(T[i][enter])) {
                    beta[i] -= Num(dir) * T[i][enter] * step;
                }
            }
            pivot(leave_row, enter, leave_side);
            beta[leave_row] = enter_val;
        }
    }

    void pivot(int r, int j, int leave_side) {
        const int old = basis[r];
        vstat[old] = leave_side;
        const Num piv = T[r][j];
        if (piv != Num(1)) {
            for (auto& entry : T[r]) {
                if (!is_zero(entry)) entry /= piv;
            }
            T[r][j] = Num(1);
        }
        for (int i = 0; i < m; ++i) {
            if (i == r) continue;
            const Num factor = T[i][j];
            if (is_zero(factor)) continue;
            for (int k = 0; k < cols; ++k) {
                if (!is_zero(T[r][k])) T[i][k] -= factor * T[r][k];
            }
            T[i][j] = Num(0);
        }
        {
            const Num factor = d[j];
            if (!is_zero(factor)) {
                for (int k = 0; k < cols; ++k) {
                    if (!is_zero(T[r][k])) d[k] -= factor * T[r][k];
                }
                d[j] = Num(0);
            }
        }
        basis[r] = j;
        vstat[j] = kBasic;
        ++pivots;
    }

    // Drives basic artificials out where possible (degenerate pivots: the
    // artificial sits at zero, so no values move) and freezes them at zero.
    void retire_artificials() {
        for (int r = 0; r < m; ++r) {
            if (basis[r] < art_start) continue;
            int target = -1;
            for (int j = 0; j < art_start; ++j) {
                if (vstat[j] != kBasic && !is_zero(T[r][j])) {
                    target = j;
                    break;
                }
            }
            if (target >= 0) {
                const Num keep = value_of(target);
                pivot(r, target, kAtLower);  // artificial rests at its 0 bound
                beta[r] = keep;
            }
        }
        for (int j = art_start; j < cols; ++j) {
            banned[j] = 1;
            hi[j] = Num(0);
            hi_inf[j] = 0;
        }
    }
};

// Final basis snapshot handed to the rational verifier. Only the SET of
// basic variables matters (which tableau row each occupies does not).
struct BasisSnapshot {
    std::vector<int> basis;      // basic variable per tableau row
    std::vector<int> vstat;      // statuses for structural + slack columns
    std::vector<int> art_of_row; // row -> artificial column id, or -1
    std::vector<int> art_sign;   // per row: 0 or +-1
    bool claims_infeasible = false;
};

template <typename Num>
BasisSnapshot snapshot(const Simplex<Num>& s, bool infeasible_claim) {
    BasisSnapshot snap;
    snap.basis = s.basis;
    snap.vstat.assign(s.vstat.begin(), s.vstat.begin() + s.art_start);
    snap.art_sign = s.art_sign;
    snap.art_of_row.assign(s.m, -1);
    int next_art = s.art_start;
    for (int i = 0; i < s.m; ++i) {
        if (s.art_sign[i] != 0) snap.art_of_row[i] = next_art++;
    }
    snap.claims_infeasible = infeasible_claim;
    return snap;
}

// ----------------------------------------------------------------------
// Exact verification of a claimed-final basis. Reconstructs the basic
// solution and duals in rationals, exploiting that slack/artificial basis
// columns are unit vectors: only the structural-basic block needs Gauss.
// ----------------------------------------------------------------------

struct VerifyResult {
    bool ok = false;
    bool primal_feasible = false;
    Rational value = 0;
    std::vector<Rational> x;      // structural
    std::vector<Rational> duals;  // per row
};

// Dense rational Gauss; returns false when singular.
bool gauss_solve(std::vector<std::vector<Rational>> M, std::vector<Rational> rhs,
                 std::vector<Rational>& out) {
    const int k = static_cast<int>(M.size());
    std::vector<int> perm(k);
    for (int i = 0; i < k; ++i) perm[i] = i;
    for (int col = 0; col < k; ++col) {
        int piv = -1;
        for (int r = col; r < k; ++r) {
            if (M[r][col] != 0) {
                piv = r;
                break;
            }
        }
        if (piv < 0) return false;
        std::swap(M[col], M[piv]);
        std::swap(rhs[col], rhs[piv]);
        for (int r = col + 1; r < k; ++r) {
            if (M[r][col] == 0) continue;
            const Rational f = M[r][col] / M[col][col];
            for (int c = col; c < k; ++c) M[r][c] -= f * M[col][c];
            rhs[r] -= f * rhs[col];
        }
    }
    out.assign(k, 0);
    for (int r = k - 1; r >= 0; --r) {
        Rational acc = rhs[r];
        for (int c = r + 1; c < k; ++c) acc -= M[r][c] * out[c];
        out[r] = acc / M[r][r];
    }
    return true;
}

// Per-column sparse view of the constraint matrix (structural columns only).
struct ColumnView {
    std::vector<std::vector<std::pair<int, long long>>> cols;  // var -> (row, coeff)

    explicit ColumnView(const BinaryProgram& p) {
        cols.resize(p.num_vars);
        for (int i = 0; i < static_cast<int>(p.constraints.size()); ++i) {
            for (const auto& [j, coeff] : p.constraints[i].terms) {
                cols[j].emplace_back(i, coeff);
            }
        }
    }
};

VerifyResult verify_basis(const BinaryProgram& p, const std::vector<int>& fixed,
                          const ColumnView& view, const BasisSnapshot& snap,
                          const std::vector<Rational>& cost, bool phase_one) {
    VerifyResult res;
    const int n = p.num_vars;
    const int m = static_cast<int>(p.constraints.size());

    auto lo_of = [&](int j) -> Rational {
        return (!fixed.empty() && fixed[j] >= 0) ? Rational(fixed[j]) : Rational(0);
    };
    auto hi_of = [&](int j) -> Rational {
        return (!fixed.empty() && fixed[j] >= 0) ? Rational(fixed[j]) : Rational(1);
    };

    // Decompose the basic SET: structural basics, basic slacks (slack of row
    // i is column n+i: a unit column touching only row i), basic artificials
    // (column sign*e_i for their row). Which tableau row each occupies is
    // irrelevant for reconstructing the solution.
    std::vector<char> basic_struct(n, 0);
    std::vector<char> slack_basic(m, 0);
    std::vector<char> art_basic(m, 0);  // indexed by the artificial's row
    std::vector<int> struct_basics;
    for (int b : snap.basis) {
        if (b < n) {
            if (basic_struct[b]) return res;  // duplicate: numeric garbage
            basic_struct[b] = 1;
            struct_basics.push_back(b);
        } else if (b < n + m) {
            const int row = b - n;
            if (slack_basic[row]) return res;
            slack_basic[row] = 1;
        } else {
            int row = -1;
            for (int i = 0; i < m; ++i) {
                if (snap.art_of_row[i] == b) {
                    row = i;
                    break;
                }
            }
            if (row < 0 || art_basic[row]) return res;
            art_basic[row] = 1;
        }
    }

    // Nonbasic structural values.
    std::vector<Rational> xval(n, 0);
    for (int j = 0; j < n; ++j) {
        if (!basic_struct[j]) {
            xval[j] = snap.vstat[j] == kAtUpper ? hi_of(j) : lo_of(j);
        }
    }

    // Nonbasic slack values. A slack resting on an infinite side is a
    // numerical artifact: reject and let the caller fall back.
    std::vector<Rational> slack_val(m, 0);
    for (int i = 0; i < m; ++i) {
        if (slack_basic[i]) continue;
        const int s = n + i;
        switch (p.constraints[i].sense) {
            case SparseRow::Sense::Le:
                if (snap.vstat[s] == kAtUpper) return res;  // +inf side
                break;
            case SparseRow::Sense::Ge:
                if (snap.vstat[s] == kAtLower) return res;  // -inf side
                break;
            case SparseRow::Sense::Eq:
                break;
        }
        slack_val[i] = 0;
    }

    // Row residuals: b minus all nonbasic contributions.
    std::vector<Rational> residual(m, 0);
    for (int i = 0; i < m; ++i) residual[i] = Rational(p.constraints[i].rhs);
    for (int j = 0; j < n; ++j) {
        if (basic_struct[j] || xval[j] == 0) continue;
        for (const auto& [row, coeff] : view.cols[j]) {
            residual[row] -= Rational(coeff) * xval[j];
        }
    }

    // Rows not absorbed by a basic unit column (slack or artificial) form a
    // square system over the structural basics.
    std::vector<int> prow;
    for (int i = 0; i < m; ++i) {
        if (!slack_basic[i] && !art_basic[i]) prow.push_back(i);
    }
    const int k = static_cast<int>(prow.size());
    if (k != static_cast<int>(struct_basics.size())) return res;

    std::vector<int> row_pos(m, -1);
    for (int r = 0; r < k; ++r) row_pos[prow[r]] = r;
    std::vector<int> pcol = struct_basics;
    std::sort(pcol.begin(), pcol.end());

    std::vector<std::vector<Rational>> M(k, std::vector<Rational>(k, 0));
    std::vector<Rational> rhs_block(k, 0);
    for (int r = 0; r < k; ++r) rhs_block[r] = residual[prow[r]];
    for (int c = 0; c < k; ++c) {
        for (const auto& [row, coeff] : view.cols[pcol[c]]) {
            if (row_pos[row] >= 0) M[row_pos[row]][c] += Rational(coeff);
        }
    }
    std::vector<Rational> xb;
    if (k > 0 && !gauss_solve(M, rhs_block, xb)) return res;
    for (int c = 0; c < k; ++c) xval[pcol[c]] = xb[c];

    // Basic unit columns: substitute to get slack / artificial values.
    std::vector<Rational> leftover(m, 0);
    for (int i = 0; i < m; ++i) {
        if (!slack_basic[i] && !art_basic[i]) continue;
        Rational acc = residual[i];
        for (int c = 0; c < k; ++c) {
            const int j = pcol[c];
            if (xval[j] == 0) continue;
            for (const auto& [row, coeff] : view.cols[j]) {
                if (row == i) acc -= Rational(coeff) * xval[j];
            }
        }
        leftover[i] = acc;
    }
    std::vector<Rational> art_val(m, 0);
    for (int i = 0; i < m; ++i) {
        if (slack_basic[i]) {
            slack_val[i] = leftover[i];
        } else if (art_basic[i]) {
            // Basic artificial (column sign*e_i): value = sign * leftover.
            const Rational art = Rational(snap.art_sign[i]) * leftover[i];
            if (art < 0) return res;
            if (!phase_one && art != 0) return res;
            art_val[i] = art;
        }
    }

    // Primal feasibility.
    for (int j = 0; j < n; ++j) {
        if (basic_struct[j] && (xval[j] < lo_of(j) || xval[j] > hi_of(j))) return res;
    }
    for (int i = 0; i < m; ++i) {
        if (!slack_basic[i]) continue;
        switch (p.constraints[i].sense) {
            case SparseRow::Sense::Le:
                if (slack_val[i] < 0) return res;
                break;
            case SparseRow::Sense::Ge:
                if (slack_val[i] > 0) return res;
                break;
            case SparseRow::Sense::Eq:
                if (slack_val[i] != 0) return res;
                break;
        }
    }
    res.primal_feasible = true;

    // Duals. Basic unit columns pin y on their rows; the structural basics
    // give the transpose block system on the remaining rows.
    std::vector<Rational> y(m, 0);
    for (int i = 0; i < m; ++i) {
        if (slack_basic[i]) {
            y[i] = 0;  // slack cost is zero in both phases
        } else if (art_basic[i]) {
            // artificial cost is -1 in phase 1; column is sign * e_i
            y[i] = phase_one ? Rational(-snap.art_sign[i]) : Rational(0);
        }
    }
    if (k > 0) {
        std::vector<std::vector<Rational>> Mt(k, std::vector<Rational>(k, 0));
        std::vector<Rational> rhs_t(k, 0);
        for (int c = 0; c < k; ++c) {
            const int j = pcol[c];
            rhs_t[c] = phase_one ? Rational(0) : cost[j];
            for (const auto& [row, coeff] : view.cols[j]) {
                if (row_pos[row] >= 0) {
                    Mt[c][row_pos[row]] += Rational(coeff);
                } else {
                    rhs_t[c] -= y[row] * Rational(coeff);
                }
            }
        }
        std::vector<Rational> yb;
        if (!gauss_solve(Mt, rhs_t, yb)) return res;
        for (int r = 0; r < k; ++r) y[prow[r]] = yb[r];
    }

    // Dual feasibility (maximization conventions) on movable nonbasics.
    for (int j = 0; j < n; ++j) {
        if (basic_struct[j]) continue;
        if (lo_of(j) == hi_of(j)) continue;  // fixed: no direction to move
        Rational dj = phase_one ? Rational(0) : cost[j];
        for (const auto& [row, coeff] : view.cols[j]) dj -= y[row] * Rational(coeff);
        if (snap.vstat[j] == kAtLower ? dj > 0 : dj < 0) return res;
    }
    for (int i = 0; i < m; ++i) {
        if (slack_basic[i]) continue;
        const Rational dj = -y[i];  // slack cost zero
        switch (p.constraints[i].sense) {
            case SparseRow::Sense::Le:
                if (dj > 0) return res;  // resting at lower bound 0
                break;
            case SparseRow::Sense::Ge:
                if (dj < 0) return res;  // resting at upper bound 0
                break;
            case SparseRow::Sense::Eq:
                break;  // fixed slack: no dual condition
        }
    }
    if (phase_one) {
        // Nonbasic artificials (cost -1, column sign*e_i, resting at 0) must
        // also price out: -1 - y_i*sign <= 0.
        for (int i = 0; i < m; ++i) {
            if (snap.art_sign[i] == 0 || art_basic[i]) continue;
            const Rational dj = Rational(-1) - y[i] * Rational(snap.art_sign[i]);
            if (dj > 0) return res;
        }
    }

    if (phase_one) {
        Rational art_sum = 0;
        for (int i = 0; i < m; ++i) art_sum += art_val[i];
        res.value = -art_sum;
    } else {
        res.value = 0;
        for (int j = 0; j < n; ++j) {
            if (cost[j] != 0 && xval[j] != 0) res.value += cost[j] * xval[j];
        }
    }
    res.x = std::move(xval);
    res.duals = std::move(y);
    res.ok = true;
    return res;
}

// ----------------------------------------------------------------------
// Exact LP solve: float simplex, rational verification, rational fallback.
// ----------------------------------------------------------------------

struct ExactLp {
    bool feasible = false;
    Rational value = 0;
    std::vector<Rational> x;
    std::vector<Rational> duals;
    long long pivots = 0;
    bool fell_back = false;
    bool deadline_hit = false;
};

template <typename Num>
SimplexEnd run_simplex(Simplex<Num>& s, const BinaryProgram& p,
                       const Deadline& deadline, bool& infeasible) {
    infeasible = false;
    const long long cap = 20000 + 200LL * (s.m + s.cols);
    if (s.has_artificials()) {
        std::vector<Num> c1(s.cols, Num(0));
        for (int j = s.art_start; j < s.cols; ++j) c1[j] = Num(-1);
        Num obj1 = s.install_costs(c1);
        const SimplexEnd end = s.iterate(obj1, deadline, cap);
        if (end != SimplexEnd::Optimal) return end;
        bool residual_infeasible;
        if constexpr (SimplexTraits<Num>::exact) {
            residual_infeasible = obj1 < 0;
        } else {
            residual_infeasible = obj1 < -1e-7;
        }
        if (residual_infeasible) {
            infeasible = true;
            return SimplexEnd::Optimal;
        }
        s.retire_artificials();
    }
    std::vector<Num> c2(s.cols, Num(0));
    for (int j = 0; j < p.num_vars; ++j) {
        if (p.sense == BinaryProgram::Sense::Maximize) c2[j] = Num(p.objective[j]);
    }
    Num obj2 = s.install_costs(c2);
    return s.iterate(obj2, deadline, cap);
}

ExactLp rational_lp(const BinaryProgram& p, const std::vector<int>& fixed,
                    const Deadline& deadline) {
    ExactLp out;
    Simplex<Rational> s;
    s.build(p, fixed);
    bool infeasible = false;
    const SimplexEnd end = run_simplex(s, p, deadline, infeasible);
    out.pivots = s.pivots;
    if (end != SimplexEnd::Optimal) {
        out.deadline_hit = true;
        return out;
    }
    if (infeasible) return out;
    out.feasible = true;
    out.x.assign(p.num_vars, 0);
    for (int j = 0; j < p.num_vars; ++j) {
        out.x[j] = s.vstat[j] == kBasic ? 0 : s.value_of(j);
    }
    for (int i = 0; i < s.m; ++i) {
        if (s.basis[i] < p.num_vars) out.x[s.basis[i]] = s.beta[i];
    }
    out.duals.assign(s.m, 0);
    for (int i = 0; i < s.m; ++i) out.duals[i] = -s.d[p.num_vars + i];
    out.value = 0;
    for (int j = 0; j < p.num_vars; ++j) {
        if (p.sense == BinaryProgram::Sense::Maximize && p.objective[j] != 0) {
            out.value += Rational(p.objective[j]) * out.x[j];
        }
    }
    return out;
}

ExactLp exact_lp(const BinaryProgram& p, const std::vector<int>& fixed,
                 const ColumnView& view, const Deadline& deadline) {
    ExactLp out;

    Simplex<double> s;
    s.build(p, fixed);
    bool infeasible = false;
    const SimplexEnd end = run_simplex(s, p, deadline, infeasible);
    out.pivots = s.pivots;

    if (end == SimplexEnd::Optimal) {
        const BasisSnapshot snap = snapshot(s, infeasible);
        std::vector<Rational> cost(p.num_vars, 0);
        if (!infeasible && p.sense == BinaryProgram::Sense::Maximize) {
            for (int j = 0; j < p.num_vars; ++j) cost[j] = Rational(p.objective[j]);
        }
        const VerifyResult v =
            verify_basis(p, fixed, view, snap, cost, /*phase_one=*/infeasible);
        if (v.ok) {
            if (infeasible) {
                if (v.value < 0) return out;  // exact infeasibility certificate
                // Phase-1 optimum is actually zero: float path misjudged;
                // fall through to the rational solve.
            } else {
                out.feasible = true;
                out.value = v.value;
                out.x = v.x;
                out.duals = v.duals;
                return out;
            }
        }
    }

    if (deadline.expired()) {
        out.deadline_hit = true;
        return out;
    }
    ExactLp exact = rational_lp(p, fixed, deadline);
    exact.pivots += out.pivots;
    exact.fell_back = true;
    return exact;
}

bool assignment_satisfies(const BinaryProgram& p, const std::vector<std::uint8_t>& x) {
    for (const auto& row : p.constraints) {
        long long lhs = 0;
        for (const auto& [j, coeff] : row.terms) lhs += coeff * x[j];
        switch (row.sense) {
            case SparseRow::Sense::Le:
                if (lhs > row.rhs) return false;
                break;
            case SparseRow::Sense::Ge:
                if (lhs < row.rhs) return false;
                break;
            case SparseRow::Sense::Eq:
                if (lhs != row.rhs) return false;
                break;
        }
    }
    return true;
}

Rational floor_rational(const Rational& v) {
    using boost::multiprecision::cpp_int;
    cpp_int num = numerator(v), den = denominator(v);
    cpp_int q = num / den;
    if (num < 0 && q * den != num) --q;
    return Rational(q);
}

}  // namespace

SolveOutcome solve(const BinaryProgram& program, const SolveOptions& options) {
    for (const auto& row : program.constraints) {
        for (const auto& [j, coeff] : row.terms) {
            (void)coeff;
            if (j < 0 || j >= program.num_vars) {
                throw Error(ErrorKind::Internal, "constraint references invalid variable");
            }
        }
    }

    SolveOutcome out;
    const bool maximize = program.sense == BinaryProgram::Sense::Maximize;
    const ColumnView view(program);

    struct Node {
        std::vector<int> fixed;
        Rational inherited_bound;
    };

    Rational root_bound = 0;
    if (maximize) {
        for (long long c : program.objective) {
            if (c > 0) root_bound += c;
        }
    }

    std::vector<Node> stack;
    stack.push_back({std::vector<int>(program.num_vars, -1), root_bound});
    std::multiset<Rational> open_bounds{root_bound};

    bool have_best = false;
    long long best_value = 0;
    std::vector<std::uint8_t> best_assignment;

    auto best_open_bound = [&]() -> Rational {
        Rational b = have_best ? Rational(best_value) : Rational(0);
        if (!open_bounds.empty() && *open_bounds.rbegin() > b) b = *open_bounds.rbegin();
        return b;
    };

    while (!stack.empty()) {
        if (options.deadline.expired()) {
            out.status = SolveStatus::TimeLimit;
            out.has_assignment = have_best;
            out.assignment = best_assignment;
            out.objective_value = best_value;
            out.bound = best_open_bound();
            return out;
        }
        Node node = std::move(stack.back());
        stack.pop_back();
        open_bounds.erase(open_bounds.find(node.inherited_bound));
        ++out.work.bb_nodes;

        if (maximize && have_best &&
            floor_rational(node.inherited_bound) <= Rational(best_value)) {
            continue;
        }

        ExactLp lp = exact_lp(program, node.fixed, view, options.deadline);
        out.work.lp_solves += 1;
        out.work.simplex_pivots += lp.pivots;
        if (lp.fell_back) out.work.rational_fallbacks += 1;
        if (lp.deadline_hit) {
            out.status = SolveStatus::TimeLimit;
            out.has_assignment = have_best;
            out.assignment = best_assignment;
            out.objective_value = best_value;
            out.bound = best_open_bound();  // node already left open_bounds
            if (node.inherited_bound > out.bound) out.bound = node.inherited_bound;
            return out;
        }
        if (!lp.feasible) continue;
        if (maximize && have_best && floor_rational(lp.value) <= Rational(best_value)) {
            continue;
        }

        // Exact integrality test on the rational primal.
        int branch_var = -1;
        Rational best_frac_dist = 1;
        for (int j = 0; j < program.num_vars; ++j) {
            const Rational& v = lp.x[j];
            if (v == 0 || v == 1) continue;
            const Rational dist =
                v < Rational(1, 2) ? Rational(1, 2) - v : v - Rational(1, 2);
            if (branch_var < 0 || dist < best_frac_dist) {
                branch_var = j;
                best_frac_dist = dist;
            }
        }

        if (branch_var < 0) {
            std::vector<std::uint8_t> x(program.num_vars, 0);
            for (int j = 0; j < program.num_vars; ++j) x[j] = lp.x[j] == 1 ? 1 : 0;
            if (!assignment_satisfies(program, x)) {
                throw Error(ErrorKind::Internal, "integral LP point fails row check");
            }
            long long val = 0;
            if (maximize) {
                for (int j = 0; j < program.num_vars; ++j) {
                    if (x[j]) val += program.objective[j];
                }
            }
            if (!have_best || (maximize && val > best_value)) {
                have_best = true;
                best_value = val;
                best_assignment = std::move(x);
            }
            if (!maximize) {
                out.status = SolveStatus::Feasible;
                out.has_assignment = true;
                out.assignment = best_assignment;
                out.objective_value = 0;
                out.bound = 0;
                return out;
            }
            continue;
        }

        // Depth-first: explore the x = 1 branch first.
        Node zero = node;
        zero.fixed[branch_var] = 0;
        zero.inherited_bound = lp.value;
        Node one = std::move(node);
        one.fixed[branch_var] = 1;
        one.inherited_bound = lp.value;
        open_bounds.insert(zero.inherited_bound);
        open_bounds.insert(one.inherited_bound);
        stack.push_back(std::move(zero));
        stack.push_back(std::move(one));
    }

    if (have_best) {
        out.status = SolveStatus::Optimal;
        out.has_assignment = true;
        out.assignment = best_assignment;
        out.objective_value = best_value;
        out.bound = Rational(best_value);
    } else {
        out.status = SolveStatus::Infeasible;
        out.bound = 0;
    }
    return out;
}

LpSolution solve_lp_relaxation(const BinaryProgram& program,
                               const std::vector<int>& fixed) {
    const ColumnView view(program);
    ExactLp lp = exact_lp(program, fixed, view, Deadline::unlimited());
    LpSolution out;
    out.feasible = lp.feasible;
    out.value = lp.value;
    out.primal = lp.x;
    out.duals = lp.duals;
    out.work.lp_solves = 1;
    out.work.simplex_pivots = lp.pivots;
    out.work.rational_fallbacks = lp.fell_back ? 1 : 0;
    return out;
}

ColumnGenResult column_generate(int num_rows, const std::vector<long long>& row_rhs,
                                const Pricer& pricer, const SolveOptions& options) {
    ColumnGenResult res;
    std::vector<Column> columns;

    auto build_program = [&]() {
        BinaryProgram p;
        p.sense = BinaryProgram::Sense::Maximize;
        std::vector<SparseRow> rows(num_rows);
        for (int i = 0; i < num_rows; ++i) {
            rows[i].sense = SparseRow::Sense::Le;
            rows[i].rhs = row_rhs[i];
        }
        for (const Column& col : columns) {
            const int var = p.add_var(col.objective);
            for (const auto& [row, coeff] : col.rows) {
                rows[row].terms.emplace_back(var, coeff);
            }
        }
        p.constraints = std::move(rows);
        return p;
    };

    Rational lp_value = 0;
    while (true) {
        if (options.deadline.expired()) {
            res.hit_time_limit = true;
            break;
        }
        const BinaryProgram p = build_program();
        LpSolution lp = solve_lp_relaxation(p);
        res.work += lp.work;
        if (!lp.feasible) {
            throw Error(ErrorKind::Internal, "restricted master LP infeasible");
        }
        lp_value = lp.value;
        std::vector<Column> fresh = pricer(lp.duals);
        if (fresh.empty()) break;
        for (auto& col : fresh) columns.push_back(std::move(col));
    }

    res.lp_value = lp_value;
    const BinaryProgram final_program = build_program();
    SolveOutcome ip = solve(final_program, SolveOptions{options.deadline, options.seed});
    res.work += ip.work;
    if (ip.status == SolveStatus::TimeLimit) res.hit_time_limit = true;
    if (ip.has_assignment) {
        res.integral_value = ip.objective_value;
        for (int j = 0; j < final_program.num_vars; ++j) {
            if (ip.assignment[j]) res.chosen.push_back(columns[j].external_id);
        }
    }
    return res;
}

void dump_lp_format(const BinaryProgram& program, std::ostream& out) {
    out << (program.sense == BinaryProgram::Sense::Maximize ? "Maximize\n" : "Minimize\n");
    out << " obj:";
    bool any = false;
    for (int j = 0; j < program.num_vars; ++j) {
        const long long c =
            program.sense == BinaryProgram::Sense::Maximize ? program.objective[j] : 0;
        if (c == 0) continue;
        out << (c > 0 ? " +" : " ") << c << " x" << j;
        any = true;
    }
    if (!any) out << " 0 x0";
    out << "\nSubject To\n";
    for (size_t i = 0; i < program.constraints.size(); ++i) {
        const auto& row = program.constraints[i];
        out << " c" << i << ":";
        for (const auto& [j, coeff] : row.terms) {
            out << (coeff > 0 ? " +" : " ") << coeff << " x" << j;
        }
        switch (row.sense) {
            case SparseRow::Sense::Le: out << " <= "; break;
            case SparseRow::Sense::Ge: out << " >= "; break;
            case SparseRow::Sense::Eq: out << " = "; break;
        }
        out << row.rhs << "\n";
    }
    out << "Binary\n";
    for (int j = 0; j < program.num_vars; ++j) out << " x" << j << "\n";
    out << "End\n";
}

}  // namespace kepro
