#pragma once

// Twisted Griffiths-Dwork reduction.  One ReductionLevel per pole order a
// holds the joint linear system
//
//   Step 1:  C . grad F  =  Q - R        (rows: degree-(L+1)a monomials)
//   Step 2:  C . grad U  =  c U          (rows: degree-((L+1)a - 1) monomials)
//   plus     x_i | C_i   whenever rho_i != 0  (imposed on the unknown space)
//
// echelonized once with marker columns tracking the right-hand side.  Rows
// whose unknown part eliminates to zero are the cokernel functionals; their
// reduced row echelon form picks the canonical complement basis R_a (the
// pivot monomials, greedily against the fixed monomial order) and evaluates
// residue coordinates.  decompose() then back-substitutes the canonical
// (C, c) for any numerator, and reduce_once lowers the pole by one via the
// exactness identity, dividing by (a - 1 + sigma).

#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <utility>
#include <vector>

#include "linsolve.hpp"
#include "twist.hpp"

namespace twistpf {

struct ReductionStep {
    int a = 0;                 // pole order the step acts on
    std::vector<HomoPoly> C;   // Step-1 vector field coefficients
    HomoPoly c;                // Step-2 scalar
};

using ReductionCertificate = std::vector<ReductionStep>;

class ReductionLevel {
  public:
    ReductionLevel(const ReductionContext& ctx, int a, int threads = 1) : a_(a) {
        if (a < 1) throw std::invalid_argument("reduction level needs pole order >= 1");
        const int n = ctx.nvars;
        const long L = ctx.L;
        const long dC = (L + 1) * a - L;       // degree of each C_i
        const long dc = (L + 1) * (a - 1);     // degree of the Step-2 scalar c
        const long dS2 = (L + 1) * a - 1;      // Step-2 row space degree
        const long dS1 = (L + 1) * a;          // Step-1 row space degree = deg Q

        qmonos_ = enumerate_monomials(n, dS1);
        s2monos_ = enumerate_monomials(n, dS2);
        cmonos_ = enumerate_monomials(n, dc);
        const std::vector<EVec> cimonos = enumerate_monomials(n, dC);

        auto index_of = [](const std::vector<EVec>& monos, const EVec& e) {
            auto it = std::lower_bound(monos.begin(), monos.end(), e,
                                       [](const EVec& x, const EVec& y) { return evec_cmp(x, y) > 0; });
            if (it == monos.end() || *it != e) throw std::logic_error("monomial index lookup failed");
            return static_cast<int>(it - monos.begin());
        };

        // Column layout: C_1 block, ..., C_n block, then the c block.  With a
        // nonzero rho_i the twist demands x_i | C_i, so that block only keeps
        // monomials with e_i >= 1.
        col_offsets_.assign(n + 1, 0);
        for (int i = 0; i < n; ++i) {
            col_offsets_[i] = static_cast<int>(columns_.size());
            for (const auto& e : cimonos) {
                if (!ctx.twist.rho[i].is_zero() && e[i] == 0) continue;
                columns_.push_back({i, e});
            }
        }
        col_offsets_[n] = static_cast<int>(columns_.size());
        const int c_base = static_cast<int>(columns_.size());
        const int ncols = c_base + static_cast<int>(cmonos_.size());

        // Assemble rows column-by-column (scatter), then feed the solver.
        std::vector<std::vector<std::pair<int, ParamField>>> s2rows(s2monos_.size());
        std::vector<std::vector<std::pair<int, ParamField>>> s1rows(qmonos_.size());
        for (int col = 0; col < c_base; ++col) {
            const auto& [i, alpha] = columns_[col];
            for (const auto& t : ctx.gradU[i].terms()) {
                EVec e(alpha);
                for (int k = 0; k < n; ++k) e[k] = static_cast<std::uint16_t>(e[k] + t.first[k]);
                s2rows[index_of(s2monos_, e)].emplace_back(col, t.second);
            }
            for (const auto& t : ctx.gradF[i].terms()) {
                EVec e(alpha);
                for (int k = 0; k < n; ++k) e[k] = static_cast<std::uint16_t>(e[k] + t.first[k]);
                s1rows[index_of(qmonos_, e)].emplace_back(col, t.second);
            }
        }
        for (std::size_t j = 0; j < cmonos_.size(); ++j) {
            int col = c_base + static_cast<int>(j);
            for (const auto& t : ctx.U.terms()) {
                EVec e(cmonos_[j]);
                for (int k = 0; k < n; ++k) e[k] = static_cast<std::uint16_t>(e[k] + t.first[k]);
                s2rows[index_of(s2monos_, e)].emplace_back(col, -t.second);
            }
        }

        ech_ = std::make_unique<Echelon>(ncols, threads);
        auto add = [&](std::vector<std::pair<int, ParamField>>& entries, int marker_slot) {
            if (entries.empty() && marker_slot < 0) return;
            std::sort(entries.begin(), entries.end(),
                      [](const auto& x, const auto& y) { return x.first < y.first; });
            // merge duplicate columns, clear denominators jointly
            std::vector<std::pair<int, ParamField>> merged;
            for (auto& kv : entries) {
                if (!merged.empty() && merged.back().first == kv.first)
                    merged.back().second += kv.second;
                else
                    merged.push_back(std::move(kv));
            }
            ParamPoly d(Rat(1));
            for (const auto& kv : merged)
                if (!kv.second.is_zero()) d = poly_lcm(d, kv.second.den());
            SparseRow row;
            for (const auto& kv : merged) {
                if (kv.second.is_zero()) continue;
                row.e.emplace_back(kv.first, kv.second.num() * d.divexact(kv.second.den()));
            }
            if (marker_slot >= 0) row.e.emplace_back(ncols + marker_slot, d);
            if (!row.e.empty()) ech_->add_row(std::move(row));
        };
        for (auto& r : s2rows) add(r, -1);
        for (std::size_t k = 0; k < s1rows.size(); ++k) add(s1rows[k], static_cast<int>(k));
        ech_->echelonize();

        build_complement();
    }

    int a() const { return a_; }
    const std::vector<EVec>& residue_basis() const { return complement_monos_; }
    int complement_dim() const { return static_cast<int>(complement_monos_.size()); }
    int rank() const { return ech_->rank(); }
    std::size_t unknowns() const { return columns_.size() + cmonos_.size(); }
    std::size_t q_space_dim() const { return qmonos_.size(); }

    struct Decomposition {
        std::vector<HomoPoly> C;
        HomoPoly c;
        std::vector<ParamField> residue;  // coordinates over the complement basis
    };

    // Basis of the homogeneous solution space of the joint level system:
    // pairs (C, c) with C . grad F = 0 and C . grad U = c U.  These are the
    // syzygies; their Step-3 images are exact forms with no pole-a part, and
    // the driver quotients the normal-form space by their reductions.
    std::vector<ReductionStep> kernel_steps(const ReductionContext& ctx, int threads = 1) const {
        const int n = ctx.nvars;
        auto basis = ech_->nullspace();
        std::vector<ReductionStep> out(basis.size());
        parallel_for(static_cast<long>(basis.size()), threads, [&](long vi) {
            const auto& v = basis[vi];
            ReductionStep step;
            step.a = a_;
            step.C.assign(n, HomoPoly(n, (ctx.L + 1) * a_ - ctx.L));
            for (int col = 0; col < col_offsets_[n]; ++col) {
                if (v[col].is_zero()) continue;
                const auto& [i, e] = columns_[col];
                step.C[i] += HomoPoly::monomial(n, e, v[col]);
            }
            step.c = HomoPoly(n, (ctx.L + 1) * (a_ - 1));
            for (std::size_t j = 0; j < cmonos_.size(); ++j) {
                const ParamField& w = v[col_offsets_[n] + j];
                if (!w.is_zero()) step.c += HomoPoly::monomial(n, cmonos_[j], w);
            }
            if (!dot_grad(step.C, ctx.F).is_zero()) throw std::logic_error("kernel step fails Step 1");
            if (dot_grad(step.C, ctx.U) != step.c * ctx.U) throw std::logic_error("kernel step fails Step 2");
            out[vi] = std::move(step);
        });
        return out;
    }

    // threads = 0 delegates to the solver's build-time thread count.
    Decomposition decompose(const ReductionContext& ctx, const HomoPoly& Q, int threads = 0) const {
        if (!Q.is_zero() && Q.degree() != (ctx.L + 1) * a_)
            throw std::invalid_argument("numerator degree does not match this level");
        const int n = ctx.nvars;
        std::vector<ParamField> b(qmonos_.size());
        for (const auto& t : Q.terms()) b[qindex(t.first)] = t.second;

        Decomposition out;
        out.residue.reserve(G_.size());
        for (std::size_t r = 0; r < G_.size(); ++r) {
            ParamField v;
            for (const auto& kv : G_[r])
                if (!b[kv.first].is_zero()) v += kv.second * b[kv.first];
            out.residue.push_back(v);
            if (!v.is_zero()) b[complement_cols_[r]] -= v;  // G is in RREF: pivot entry is 1
        }

        auto sol = ech_->solve(b, threads);
        if (!sol.consistent)
            throw std::logic_error("level system inconsistent after residue projection (row " +
                                   std::to_string(sol.violated_row) + ", value " +
                                   ech_->rhs_value(sol.violated_row, b).to_string() + ")");

        out.C.assign(n, HomoPoly(n, (ctx.L + 1) * a_ - ctx.L));
        for (int col = 0; col < col_offsets_[n]; ++col) {
            if (sol.x[col].is_zero()) continue;
            const auto& [i, e] = columns_[col];
            out.C[i] += HomoPoly::monomial(n, e, sol.x[col]);
        }
        out.c = HomoPoly(n, (ctx.L + 1) * (a_ - 1));
        for (std::size_t j = 0; j < cmonos_.size(); ++j) {
            const ParamField& v = sol.x[col_offsets_[n] + j];
            if (!v.is_zero()) out.c += HomoPoly::monomial(n, cmonos_[j], v);
        }

        // Re-check the defining equations by direct polynomial arithmetic;
        // the decomposition is certified, never trusted.
        HomoPoly R(n, (ctx.L + 1) * a_);
        for (std::size_t r = 0; r < G_.size(); ++r)
            if (!out.residue[r].is_zero())
                R += HomoPoly::monomial(n, qmonos_[complement_cols_[r]], out.residue[r]);
        if (dot_grad(out.C, ctx.F) != Q - R) throw std::logic_error("Step-1 verification failed");
        if (dot_grad(out.C, ctx.U) != out.c * ctx.U) throw std::logic_error("Step-2 verification failed");
        return out;
    }

  private:
    int qindex(const EVec& e) const {
        auto it = std::lower_bound(qmonos_.begin(), qmonos_.end(), e,
                                   [](const EVec& x, const EVec& y) { return evec_cmp(x, y) > 0; });
        if (it == qmonos_.end() || *it != e) throw std::logic_error("numerator monomial out of range");
        return static_cast<int>(it - qmonos_.begin());
    }

    // Reduced row echelon form of the cokernel functionals over the numerator
    // monomials in their fixed enumeration order; the pivot columns are the
    // canonical complement basis.
    void build_complement() {
        std::vector<std::vector<ParamField>> rows;
        for (int r : ech_->functional_rows()) {
            std::vector<ParamField> row(qmonos_.size());
            bool nonzero = false;
            for (const auto& kv : ech_->row(r).e) {
                if (kv.first < ech_->main_cols()) continue;
                row[kv.first - ech_->main_cols()] = ParamField(kv.second);
                nonzero = true;
            }
            if (nonzero) rows.push_back(std::move(row));
        }
        std::vector<bool> used(rows.size(), false);
        std::vector<std::pair<int, int>> piv;  // (column, row)
        for (std::size_t col = 0; col < qmonos_.size(); ++col) {
            int pivot = -1;
            for (std::size_t r = 0; r < rows.size(); ++r)
                if (!used[r] && !rows[r][col].is_zero()) {
                    pivot = static_cast<int>(r);
                    break;
                }
            if (pivot < 0) continue;
            used[pivot] = true;
            ParamField inv = rows[pivot][col].inverse();
            for (auto& v : rows[pivot]) v *= inv;
            for (std::size_t r = 0; r < rows.size(); ++r) {
                if (static_cast<int>(r) == pivot || rows[r][col].is_zero()) continue;
                ParamField f = rows[r][col];
                for (std::size_t cidx = 0; cidx < qmonos_.size(); ++cidx)
                    if (!rows[pivot][cidx].is_zero()) rows[r][cidx] -= f * rows[pivot][cidx];
            }
            piv.emplace_back(static_cast<int>(col), pivot);
        }
        // Snapshot only after the sweep: earlier pivot rows keep changing
        // while later columns are cleared, and the projection algebra needs
        // the final reduced rows (zero at every other pivot column).
        for (const auto& [col, r] : piv) {
            complement_cols_.push_back(col);
            complement_monos_.push_back(qmonos_[col]);
            std::vector<std::pair<int, ParamField>> sparse;
            for (std::size_t cidx = 0; cidx < qmonos_.size(); ++cidx)
                if (!rows[r][cidx].is_zero()) sparse.emplace_back(static_cast<int>(cidx), rows[r][cidx]);
            G_.push_back(std::move(sparse));
        }
        // note: iterating columns in order makes complement_cols_ ascending,
        // i.e. the complement basis is listed in the fixed monomial order
    }

    int a_;
    std::vector<EVec> qmonos_, s2monos_, cmonos_;
    std::vector<std::pair<int, EVec>> columns_;  // C blocks: (edge index, monomial)
    std::vector<int> col_offsets_;
    std::unique_ptr<Echelon> ech_;
    std::vector<int> complement_cols_;
    std::vector<EVec> complement_monos_;
    std::vector<std::vector<std::pair<int, ParamField>>> G_;  // RREF functionals, sparse rows
};

inline std::shared_ptr<const ReductionLevel> build_level(const ReductionContext& ctx, int a,
                                                         int threads = 1) {
    return std::make_shared<const ReductionLevel>(ctx, a, threads);
}

// Thread-safe per-context cache so parallel drivers build each level once.
class LevelCache {
  public:
    std::shared_ptr<const ReductionLevel> get(const ReductionContext& ctx, int a, int threads = 1) {
        {
            std::lock_guard<std::mutex> lock(mutex_);
            auto it = levels_.find(a);
            if (it != levels_.end()) return it->second;
        }
        auto built = build_level(ctx, a, threads);
        std::lock_guard<std::mutex> lock(mutex_);
        auto [it, inserted] = levels_.emplace(a, std::move(built));
        return it->second;
    }

    void put(int a, std::shared_ptr<const ReductionLevel> level) {
        std::lock_guard<std::mutex> lock(mutex_);
        levels_.emplace(a, std::move(level));
    }

  private:
    std::mutex mutex_;
    std::map<int, std::shared_ptr<const ReductionLevel>> levels_;
};

struct ReduceOnceResult {
    TwistedForm lowered;              // pole dropped by one
    std::vector<ParamField> residue;  // coordinates over the level's complement basis
    ReductionStep step;
};

// Pole-(a-1) numerator of d(beta) for the data (C, c) of a pole-a step:
// (div C + lambda_U c + sum_i rho_i C_i / x_i) / (a - 1 + sigma).
inline HomoPoly lowered_numerator(const ReductionContext& ctx, int a, const std::vector<HomoPoly>& C,
                                  const HomoPoly& c) {
    HomoPoly next = divergence(C);
    if (!ctx.twist.lambda_u.is_zero()) next += c.scale(ctx.twist.lambda_u);
    for (int i = 0; i < ctx.nvars; ++i) {
        if (ctx.twist.rho[i].is_zero() || C[i].is_zero()) continue;
        HomoPoly quo, rem;
        C[i].divide_by_var(i, quo, rem);
        if (!rem.is_zero()) throw std::logic_error("divisibility constraint violated in reduction");
        next += quo.scale(ctx.twist.rho[i]);
    }
    return next.scale(ctx.twist.pole_factor(a).inverse());
}

inline ReduceOnceResult reduce_once(const ReductionContext& ctx, const ReductionLevel& level,
                                    const TwistedForm& f, int threads = 0) {
    check_form(ctx, f);
    if (f.a != level.a()) throw std::invalid_argument("form pole order does not match the level");
    auto dec = level.decompose(ctx, f.Q, threads);

    ReduceOnceResult out;
    out.lowered = TwistedForm{lowered_numerator(ctx, f.a, dec.C, dec.c), f.a - 1};
    out.residue = std::move(dec.residue);
    out.step = ReductionStep{f.a, std::move(dec.C), std::move(dec.c)};
    return out;
}

// Canonical coordinates of a twisted form in cohomology: residue coordinates
// at every pole level it passes through, plus the coefficient of the
// fundamental class at pole 0.
struct NormalForm {
    std::map<int, std::vector<ParamField>> residues;  // level -> coordinates
    ParamField level0;
};

struct NormalFormResult {
    NormalForm nf;
    ReductionCertificate certificate;
};

inline NormalFormResult normal_form(const ReductionContext& ctx, LevelCache& cache, TwistedForm f,
                                    int threads = 1) {
    check_form(ctx, f);
    NormalFormResult out;
    while (f.a > 0) {
        if (f.Q.is_zero()) return out;  // nothing left to reduce; all lower coordinates vanish
        auto level = cache.get(ctx, f.a, threads);
        auto step = reduce_once(ctx, *level, f, threads);
        out.nf.residues[f.a] = std::move(step.residue);
        out.certificate.push_back(std::move(step.step));
        f = std::move(step.lowered);
    }
    if (!f.Q.is_zero()) out.nf.level0 = f.Q.terms().front().second;
    return out;
}

// A certified exact class: a normal-form vector together with the reduction
// steps witnessing that it is a total derivative.  The dependency search may
// add any combination of these for free.
struct ExactVector {
    NormalForm nf;
    ReductionCertificate certificate;
};

// Exact classes contributed by the syzygies of the level-a system.  The
// normal form is not injective on cohomology by itself: a kernel pair (C, c)
// yields d(beta) with no pole-a part but a generally nonzero lowered part, so
// distinct representatives of one class can reduce to distinct vectors that
// differ by exactly these.  Quotienting by their span restores invariance.
inline std::vector<ExactVector> syzygy_normal_forms(const ReductionContext& ctx, LevelCache& cache,
                                                    int a, int threads = 1) {
    auto level = cache.get(ctx, a, threads);
    // The descents below run in parallel with single-threaded solves, so the
    // lower levels they share must exist before the workers start.
    for (int lo = 1; lo < a; ++lo) cache.get(ctx, lo, threads);
    auto steps = level->kernel_steps(ctx, threads);
    std::vector<std::unique_ptr<ExactVector>> slots(steps.size());
    parallel_for(static_cast<long>(steps.size()), threads, [&](long i) {
        HomoPoly next = lowered_numerator(ctx, a, steps[i].C, steps[i].c);
        if (next.is_zero()) return;
        auto res = normal_form(ctx, cache, TwistedForm{std::move(next), a - 1}, 1);
        auto ev = std::make_unique<ExactVector>();
        ev->nf = std::move(res.nf);
        ev->certificate.reserve(res.certificate.size() + 1);
        ev->certificate.push_back(std::move(steps[i]));
        for (auto& s : res.certificate) ev->certificate.push_back(std::move(s));
        slots[i] = std::move(ev);
    });
    std::vector<ExactVector> out;
    out.reserve(slots.size());
    for (auto& s : slots)
        if (s) out.push_back(std::move(*s));
    return out;
}

}  // namespace twistpf
