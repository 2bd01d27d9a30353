#pragma once

// Exact sparse linear algebra over the parameter field.  The engine keeps
// rows as fraction-free ParamPoly vectors (content-normalized after every
// update) and eliminates with a deterministic pivot rule: columns in their
// fixed order, and within a column the row with the shortest support, ties
// broken by row index.  Columns at index >= main_cols are passive "marker"
// columns that track how each eliminated row combines the original
// right-hand sides; evaluating them against a concrete rhs replays the
// elimination, so one factorization serves any number of solves, and rows
// whose main part vanished become explicit cokernel functionals.

#include <future>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <thread>
#include <vector>

#ifdef TWISTPF_LINSOLVE_STATS
#include <atomic>
#include <chrono>
#endif

#include "paramfield.hpp"
#include "paramgcd.hpp"

namespace twistpf {

// Run fn(i) for i in [0, n) across the given number of workers; grains must
// be independent, completion order is immaterial.
template <class Fn>
void parallel_for(long n, int threads, Fn&& fn) {
    if (threads <= 1 || n < 2) {
        for (long i = 0; i < n; ++i) fn(i);
        return;
    }
    const long nw = std::min<long>(threads, n);
    std::vector<std::future<void>> work;
    for (long w = 1; w < nw; ++w)
        work.push_back(std::async(std::launch::async, [&fn, w, n, nw]() {
            for (long i = w; i < n; i += nw) fn(i);
        }));
    for (long i = 0; i < n; i += nw) fn(i);
    for (auto& f : work) f.get();
}

#ifdef TWISTPF_LINSOLVE_STATS
// Developer-only accounting of where elimination time goes; compiled out of
// normal builds.
struct LinsolveStats {
    static std::atomic<long long>& elim_ns() { static std::atomic<long long> v{0}; return v; }
    static std::atomic<long long>& rat_content_ns() { static std::atomic<long long> v{0}; return v; }
    static std::atomic<long long>& poly_content_ns() { static std::atomic<long long> v{0}; return v; }
    static std::atomic<long long>& combo_ns() { static std::atomic<long long> v{0}; return v; }
    static std::atomic<long long>& gcd_ns() { static std::atomic<long long> v{0}; return v; }
    static std::atomic<long long>& strip_ns() { static std::atomic<long long> v{0}; return v; }
    static std::atomic<long long>& elim_calls() { static std::atomic<long long> v{0}; return v; }
    static std::atomic<long long>& poly_content_hits() { static std::atomic<long long> v{0}; return v; }
    static std::atomic<long long>& max_deg() { static std::atomic<long long> v{0}; return v; }
    static std::atomic<long long>& max_support() { static std::atomic<long long> v{0}; return v; }
    static void note_max(std::atomic<long long>& slot, long long x) {
        long long cur = slot.load();
        while (x > cur && !slot.compare_exchange_weak(cur, x)) {}
    }
    static long long now_ns() {
        return std::chrono::duration_cast<std::chrono::nanoseconds>(
                   std::chrono::steady_clock::now().time_since_epoch())
            .count();
    }
};
#endif

struct SparseRow {
    // (column, entry), ascending by column; columns >= main_cols are markers
    std::vector<std::pair<int, ParamPoly>> e;

    const ParamPoly* find(int col) const {
        for (const auto& kv : e)
            if (kv.first == col) return &kv.second;
        return nullptr;
    }
};

class Echelon {
  public:
    explicit Echelon(int main_cols, int threads = 1)
        : main_cols_(main_cols), threads_(threads < 1 ? 1 : threads) {}

    int main_cols() const { return main_cols_; }

    int add_row(SparseRow row) {
        normalize(row);
        rows_.push_back(std::move(row));
        return static_cast<int>(rows_.size()) - 1;
    }

    void echelonize() {
        if (done_) return;
        done_ = true;
        std::map<int, std::vector<int>> buckets;  // first main column -> row indices
        for (int r = 0; r < static_cast<int>(rows_.size()); ++r) {
            int c = first_main_col(rows_[r]);
            if (c < 0) {
                if (!rows_[r].e.empty()) functionals_.push_back(r);
            } else {
                buckets[c].push_back(r);
            }
        }
        while (!buckets.empty()) {
            auto it = buckets.begin();
            int col = it->first;
            std::vector<int> rows = std::move(it->second);
            buckets.erase(it);

            int pivot = -1;
            std::size_t best = 0;
            for (int r : rows) {
                std::size_t support = main_support(rows_[r]);
                if (pivot < 0 || support < best || (support == best && r < pivot)) {
                    pivot = r;
                    best = support;
                }
            }
            pivots_.push_back({col, pivot});
            const ParamPoly pv = *rows_[pivot].find(col);
            // Each target row update is independent of the others, so the
            // bucket can be processed in parallel without changing any result.
            if (threads_ > 1 && rows.size() > 2) {
                const std::size_t nw = std::min<std::size_t>(threads_, rows.size() - 1);
                std::vector<std::future<void>> work;
                for (std::size_t w = 0; w < nw; ++w) {
                    work.push_back(std::async(std::launch::async, [&, w]() {
                        for (std::size_t idx = w; idx < rows.size(); idx += nw) {
                            int r = rows[idx];
                            if (r == pivot) continue;
                            eliminate(rows_[r], rows_[pivot], col, pv);
                        }
                    }));
                }
                for (auto& fut : work) fut.get();
                for (int r : rows) {
                    if (r == pivot) continue;
                    int c = first_main_col(rows_[r]);
                    if (c < 0) {
                        if (!rows_[r].e.empty()) functionals_.push_back(r);
                    } else {
                        buckets[c].push_back(r);
                    }
                }
            } else {
                for (int r : rows) {
                    if (r == pivot) continue;
                    eliminate(rows_[r], rows_[pivot], col, pv);
                    int c = first_main_col(rows_[r]);
                    if (c < 0) {
                        if (!rows_[r].e.empty()) functionals_.push_back(r);
                    } else {
                        buckets[c].push_back(r);
                    }
                }
            }
        }
    }

    const std::vector<std::pair<int, int>>& pivots() const { return pivots_; }
    const std::vector<int>& functional_rows() const { return functionals_; }
    const SparseRow& row(int r) const { return rows_[r]; }

    std::vector<int> free_columns() const {
        std::vector<bool> is_pivot(main_cols_, false);
        for (const auto& p : pivots_) is_pivot[p.first] = true;
        std::vector<int> out;
        for (int c = 0; c < main_cols_; ++c)
            if (!is_pivot[c]) out.push_back(c);
        return out;
    }

    int rank() const { return static_cast<int>(pivots_.size()); }

    // Marker part of a row as a dense functional over the rhs slots.
    std::vector<ParamPoly> functional(int r, int nslots) const {
        std::vector<ParamPoly> out(nslots);
        for (const auto& kv : rows_[r].e)
            if (kv.first >= main_cols_) out[kv.first - main_cols_] = kv.second;
        return out;
    }

    ParamField rhs_value(int r, const std::vector<ParamField>& b) const {
        ParamField v;
        for (const auto& kv : rows_[r].e) {
            if (kv.first < main_cols_) continue;
            const ParamField& bv = b[kv.first - main_cols_];
            if (!bv.is_zero()) v += ParamField(kv.second) * bv;
        }
        return v;
    }

    template <class Fn>
    void parallel_for(long n, Fn&& fn) const {
        twistpf::parallel_for(n, threads_, fn);
    }

    struct SolveOutcome {
        bool consistent = true;
        int violated_row = -1;           // a functional row whose pairing with b is nonzero
        std::vector<ParamField> x;       // particular solution, free unknowns zero
    };

    // Solve against a concrete rhs given per marker slot.  The marker
    // pairings dominate and are independent per row, so they are computed
    // up front in parallel; the back-substitution itself is sequential.
    // threads = 0 uses the count the instance was built with.
    SolveOutcome solve(const std::vector<ParamField>& b, int threads = 0) const {
        const int nt = threads > 0 ? threads : threads_;
        SolveOutcome out;
        std::vector<ParamField> fvals(functionals_.size());
        twistpf::parallel_for(static_cast<long>(functionals_.size()), nt,
                              [&](long i) { fvals[i] = rhs_value(functionals_[i], b); });
        for (std::size_t i = 0; i < functionals_.size(); ++i) {
            if (!fvals[i].is_zero()) {
                out.consistent = false;
                out.violated_row = functionals_[i];
                return out;
            }
        }
        std::vector<ParamField> pvals(pivots_.size());
        twistpf::parallel_for(static_cast<long>(pivots_.size()), nt,
                              [&](long k) { pvals[k] = rhs_value(pivots_[k].second, b); });
        out.x.assign(main_cols_, ParamField());
        for (std::size_t k = pivots_.size(); k-- > 0;) {
            auto [col, r] = pivots_[k];
            ParamField v = std::move(pvals[k]);
            ParamField pivot_entry;
            for (const auto& kv : rows_[r].e) {
                if (kv.first >= main_cols_) break;
                if (kv.first == col) {
                    pivot_entry = ParamField(kv.second);
                } else if (kv.first > col && !out.x[kv.first].is_zero()) {
                    v -= ParamField(kv.second) * out.x[kv.first];
                }
            }
            out.x[col] = v / pivot_entry;
        }
        return out;
    }

    // Basis of the homogeneous solution space, one vector per free column, in
    // reduced form (each basis vector has value 1 at its free column and 0 at
    // the other free columns).
    std::vector<std::vector<ParamField>> nullspace() const {
        std::vector<int> free = free_columns();
        std::vector<std::vector<ParamField>> out(free.size());
        parallel_for(static_cast<long>(free.size()), [&](long i) {
            std::vector<ParamField> v(main_cols_);
            v[free[i]] = ParamField(Rat(1));
            for (std::size_t k = pivots_.size(); k-- > 0;) {
                auto [col, r] = pivots_[k];
                ParamField s;
                ParamField pivot_entry;
                for (const auto& kv : rows_[r].e) {
                    if (kv.first >= main_cols_) break;
                    if (kv.first == col)
                        pivot_entry = ParamPoly(kv.second);
                    else if (kv.first > col && !v[kv.first].is_zero())
                        s += ParamField(kv.second) * v[kv.first];
                }
                if (!s.is_zero()) v[col] = -s / pivot_entry;
            }
            out[i] = std::move(v);
        });
        return out;
    }

  private:
    int first_main_col(const SparseRow& row) const {
        if (row.e.empty() || row.e.front().first >= main_cols_) return -1;
        return row.e.front().first;
    }

    std::size_t main_support(const SparseRow& row) const {
        std::size_t n = 0;
        for (const auto& kv : row.e) {
            if (kv.first >= main_cols_) break;
            ++n;
        }
        return n;
    }

    static void normalize(SparseRow& row) {
        if (row.e.empty()) return;
#ifdef TWISTPF_LINSOLVE_STATS
        long long t0 = LinsolveStats::now_ns();
#endif
        // joint rational content, sign fixed by the first entry
        Int num(0), den(1);
        for (const auto& kv : row.e) {
            for (const auto& t : kv.second.terms()) {
                num = int_gcd(num, t.second.get_num());
                den = int_lcm(den, t.second.get_den());
            }
        }
        Rat c(num, den);
        c.canonicalize();
        if (row.e.front().second.leading_term().second < 0) c = -c;
        if (c != 1) {
            Rat ic = Rat(1) / c;
            for (auto& kv : row.e) kv.second = kv.second * ic;
        }
#ifdef TWISTPF_LINSOLVE_STATS
        long long t1 = LinsolveStats::now_ns();
        LinsolveStats::rat_content_ns() += t1 - t0;
#endif
        // polynomial content: a degree-0 entry forces it to be trivial, so the
        // gcd pass only runs when every entry is non-constant, seeded from an
        // entry of minimal degree so coprime rows bail out after one gcd
        bool has_const = false;
        std::size_t min_idx = 0;
        long min_deg = std::numeric_limits<long>::max();
        for (std::size_t i = 0; i < row.e.size(); ++i) {
            long d = row.e[i].second.total_degree();
            if (d == 0) {
                has_const = true;
                break;
            }
            if (d < min_deg) {
                min_deg = d;
                min_idx = i;
            }
        }
        if (!has_const) {
            // gcd of the minimal-degree entry with one weighted combination
            // sampled across the rest: any common divisor of the row divides
            // both, so the content divides g.  The division sweep confirms g
            // (and performs the removal); a sampling collision shows up as a
            // failed division and is refined away by one more gcd.
            ParamPoly g = primitive_part(row.e[min_idx].second);
            if (row.e.size() > 1 && !g.is_one()) {
                ParamPoly combo;
                const std::size_t stride = row.e.size() / 32 + 1;
                int w = 1;
                for (std::size_t i = 0; i < row.e.size(); i += stride) {
                    if (i == min_idx) continue;
                    combo += row.e[i].second * Rat(w);
                    w = (w % 9) + 1;
                }
#ifdef TWISTPF_LINSOLVE_STATS
                long long tc = LinsolveStats::now_ns();
                LinsolveStats::combo_ns() += tc - t1;
#endif
                if (!combo.is_zero()) g = poly_gcd(g, combo);
#ifdef TWISTPF_LINSOLVE_STATS
                LinsolveStats::gcd_ns() += LinsolveStats::now_ns() - tc;
#endif
            }
#ifdef TWISTPF_LINSOLVE_STATS
            long long ts = LinsolveStats::now_ns();
#endif
            while (!g.is_one()) {
                std::vector<ParamPoly> quo(row.e.size());
                std::size_t bad = row.e.size();
                for (std::size_t i = 0; i < row.e.size(); ++i)
                    if (!detail::try_divide_fast(row.e[i].second, g, quo[i])) {
                        bad = i;
                        break;
                    }
                if (bad == row.e.size()) {
                    for (std::size_t i = 0; i < row.e.size(); ++i) row.e[i].second = std::move(quo[i]);
#ifdef TWISTPF_LINSOLVE_STATS
                    LinsolveStats::poly_content_hits() += 1;
#endif
                    break;
                }
                g = poly_gcd(g, row.e[bad].second);  // strictly shrinks
            }
#ifdef TWISTPF_LINSOLVE_STATS
            LinsolveStats::strip_ns() += LinsolveStats::now_ns() - ts;
#endif
        }
#ifdef TWISTPF_LINSOLVE_STATS
        LinsolveStats::poly_content_ns() += LinsolveStats::now_ns() - t1;
        long long d = 0;
        for (const auto& kv : row.e) d = std::max<long long>(d, kv.second.total_degree());
        LinsolveStats::note_max(LinsolveStats::max_deg(), d);
        LinsolveStats::note_max(LinsolveStats::max_support(), static_cast<long long>(row.e.size()));
#endif
    }

    static void eliminate(SparseRow& target, const SparseRow& pivot_row, int col, const ParamPoly& pv) {
#ifdef TWISTPF_LINSOLVE_STATS
        long long t0 = LinsolveStats::now_ns();
        LinsolveStats::elim_calls() += 1;
#endif
        const ParamPoly tv = *target.find(col);
        SparseRow out;
        out.e.reserve(target.e.size() + pivot_row.e.size());
        std::size_t i = 0, j = 0;
        while (i < target.e.size() && j < pivot_row.e.size()) {
            int ct = target.e[i].first, cp = pivot_row.e[j].first;
            if (ct < cp) {
                out.e.emplace_back(ct, target.e[i].second * pv);
                ++i;
            } else if (cp < ct) {
                out.e.emplace_back(cp, -(pivot_row.e[j].second * tv));
                ++j;
            } else {
                if (ct != col) {
                    ParamPoly v = target.e[i].second * pv - pivot_row.e[j].second * tv;
                    if (!v.is_zero()) out.e.emplace_back(ct, std::move(v));
                }
                ++i, ++j;
            }
        }
        for (; i < target.e.size(); ++i) out.e.emplace_back(target.e[i].first, target.e[i].second * pv);
        for (; j < pivot_row.e.size(); ++j)
            out.e.emplace_back(pivot_row.e[j].first, -(pivot_row.e[j].second * tv));
        normalize(out);
        target = std::move(out);
#ifdef TWISTPF_LINSOLVE_STATS
        LinsolveStats::elim_ns() += LinsolveStats::now_ns() - t0;
#endif
    }

    int main_cols_;
    int threads_ = 1;
    bool done_ = false;
    std::vector<SparseRow> rows_;
    std::vector<std::pair<int, int>> pivots_;  // (column, row) in elimination order
    std::vector<int> functionals_;             // rows reduced to pure rhs constraints
};

// --- dense facade -----------------------------------------------------------

struct LinearSolveResult {
    bool consistent = true;
    int violated_row = -1;  // index into the input rows when inconsistent
    std::vector<ParamField> solution;
    std::vector<std::vector<ParamField>> nullspace;
    int rank = 0;
};

// One-shot exact solve of A x = b with full diagnostics.
inline LinearSolveResult solve_linear(const std::vector<std::vector<ParamField>>& A,
                                      const std::vector<ParamField>& b) {
    const int nrows = static_cast<int>(A.size());
    if (static_cast<int>(b.size()) != nrows) throw std::logic_error("rhs length mismatch");
    int ncols = 0;
    for (const auto& row : A) ncols = std::max(ncols, static_cast<int>(row.size()));

    Echelon ech(ncols);
    for (int r = 0; r < nrows; ++r) {
        // clear denominators jointly so the row is polynomial; the marker
        // entry picks up the same factor, keeping the equation unchanged
        ParamPoly d(Rat(1));
        for (const auto& v : A[r])
            if (!v.is_zero()) d = poly_lcm(d, v.den());
        SparseRow row;
        for (int cidx = 0; cidx < static_cast<int>(A[r].size()); ++cidx) {
            if (A[r][cidx].is_zero()) continue;
            row.e.emplace_back(cidx, A[r][cidx].num() * d.divexact(A[r][cidx].den()));
        }
        row.e.emplace_back(ncols + r, d);
        ech.add_row(std::move(row));
    }
    ech.echelonize();

    LinearSolveResult out;
    out.rank = ech.rank();
    auto sol = ech.solve(b);
    if (!sol.consistent) {
        out.consistent = false;
        out.violated_row = sol.violated_row;
    } else {
        out.solution = std::move(sol.x);
    }
    out.nullspace = ech.nullspace();
    return out;
}

}  // namespace twistpf
