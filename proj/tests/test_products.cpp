#include <doctest.h>

#include "rmi/identities.hpp"
#include "rmi/sampling.hpp"

using namespace rmi;

namespace {

using Pairs = std::vector<std::pair<int, int>>;

RMatrixParams sampled_params(Rng& rng, int m) {
    const ModularTau tau = sample_tau(rng);
    RMatrixParams p{m, cplx{0, 0}, tau, SeriesConfig{}};
    p.hbar = sample_hbar(rng, m, tau, p.cfg);
    return p;
}

// points whose pairwise differences (and their +-h shifts) are generic
std::vector<cplx> generic_coords(Rng& rng, int count, const RMatrixParams& p) {
    const cplx h = p.hbar;
    return sample_generic_points(rng, count, p.tau, [h](const std::vector<cplx>& pts) {
        auto args = pairwise_differences(pts);
        const std::size_t base = args.size();
        for (std::size_t k = 0; k < base; ++k) {
            args.push_back(args[k] + h);
            args.push_back(args[k] - h);
        }
        return args;
    });
}

cplx scalar_phi(cplx z, const RMatrixParams& p) {
    return kronecker_phi(z, p.hbar, p.tau, p.cfg);
}

} // namespace

TEST_CASE("index subsets: invariants, complements, enumeration") {
    CHECK_THROWS_AS(IndexSubset({2, 2}, 1, 4), std::invalid_argument);
    CHECK_THROWS_AS(IndexSubset({3, 1}, 1, 4), std::invalid_argument);
    CHECK_THROWS_AS(IndexSubset({0}, 1, 4), std::invalid_argument);

    const IndexSubset s({2, 4}, 1, 5);
    CHECK(s.complement().elems == std::vector<int>{1, 3, 5});
    CHECK(s.disjoint_from(IndexSubset({1, 3}, 1, 5)));
    CHECK(!s.disjoint_from(IndexSubset({4}, 1, 5)));

    CHECK(k_subsets({1, 2, 3}, 2) ==
          std::vector<std::vector<int>>{{1, 2}, {1, 3}, {2, 3}});
    CHECK(k_subsets({1, 2}, 0) == std::vector<std::vector<int>>{{}});
}

TEST_CASE("plans: empty products and pair selection") {
    // no pair with i < j
    CHECK(plan_rij({3}, {1, 2}).factors.empty());
    // no pair with j < i
    CHECK(plan_rij_prime({1}, {2, 3}).factors.empty());
    // y over an empty second set
    CHECK(plan_y({1, 2}, {}).factors.empty());

    // definitional orderings on I = {1,2}, J = {3,4}
    CHECK(plan_rij({1, 2}, {3, 4}, BlockOrder::second_set).site_pairs() ==
          Pairs{{2, 3}, {1, 3}, {2, 4}, {1, 4}});
    CHECK(plan_rij({1, 2}, {3, 4}, BlockOrder::first_set).site_pairs() ==
          Pairs{{2, 3}, {2, 4}, {1, 3}, {1, 4}});
    CHECK(plan_rij_prime({3, 4}, {1, 2}, BlockOrder::first_set).site_pairs() ==
          Pairs{{4, 1}, {4, 2}, {3, 1}, {3, 2}});
    CHECK(plan_y({1, 2}, {3, 4}, BlockOrder::first_set).site_pairs() ==
          Pairs{{1, 3}, {1, 4}, {2, 3}, {2, 4}});
}

TEST_CASE("evaluated plans reduce to scalar products at M = 1") {
    Rng rng(11007);
    const RMatrixParams p = sampled_params(rng, 1);
    const auto coords = generic_coords(rng, 4, p);
    const LatticeSpec spec = p.lattice(4);

    // rij over I = {1,2}, J = {3,4}: product of phi(z_i - z_j) over i < j
    cplx expect{1.0, 0.0};
    for (int i : {1, 2})
        for (int j : {3, 4}) expect *= scalar_phi(coords[i - 1] - coords[j - 1], p);
    const Matrix got = eval_plan(plan_rij({1, 2}, {3, 4}), coords, p, spec);
    CHECK(std::abs(got(0, 0) - expect) <= 1e-12 * std::abs(expect));

    // rij_prime I = {3}, J = {1,2}
    cplx expect2 = scalar_phi(coords[2] - coords[0], p) * scalar_phi(coords[2] - coords[1], p);
    const Matrix got2 = eval_plan(plan_rij_prime({3}, {1, 2}), coords, p, spec);
    CHECK(std::abs(got2(0, 0) - expect2) <= 1e-12 * std::abs(expect2));
}

TEST_CASE("dual-form equality of all three product families") {
    Rng rng(909090);
    for (int m : {1, 2}) {
        const RMatrixParams p = sampled_params(rng, m);
        const auto coords = generic_coords(rng, 6, p);
        const LatticeSpec spec = p.lattice(6);
        const IndexSubset I({1, 2}, 1, 6), J({3, 4}, 1, 6);
        CHECK(check_dual_forms(I, J, coords, p, spec) <= 1e-12);
        const IndexSubset I2({2, 4}, 1, 6), J2({1, 3}, 1, 6);
        CHECK(check_dual_forms(I2, J2, coords, p, spec) <= 1e-12);
        const IndexSubset I3({5, 6}, 1, 6), J3({1, 3}, 1, 6);
        CHECK(check_dual_forms(I3, J3, coords, p, spec) <= 1e-12);
    }
}

TEST_CASE("product lemmas: exchange relations") {
    Rng rng(24601);
    {
        // scalars: both sides are the same product of numbers
        const RMatrixParams p = sampled_params(rng, 1);
        const auto coords = generic_coords(rng, 6, p);
        const LatticeSpec spec = p.lattice(6);
        const IndexSubset A({1, 4}, 1, 6), B({2, 5}, 1, 6), C({3, 6}, 1, 6);
        CHECK(check_l21(A, B, C, coords, p, spec) <= 1e-12);
        CHECK(check_l22(A, B, C, coords, p, spec) <= 1e-12);
    }
    {
        const RMatrixParams p = sampled_params(rng, 2);
        const auto coords = generic_coords(rng, 6, p);
        const LatticeSpec spec = p.lattice(6);
        const IndexSubset A({1}, 1, 6), B({2}, 1, 6), C({3}, 1, 6);
        CHECK(check_l21(A, B, C, coords, p, spec) <= 1e-10);
        CHECK(check_l22(A, B, C, coords, p, spec) <= 1e-10);
        const IndexSubset A2({1, 4}, 1, 6), B2({2, 5}, 1, 6), C2({3, 6}, 1, 6);
        CHECK(check_l21(A2, B2, C2, coords, p, spec) <= 1e-10);
        CHECK(check_l22(A2, B2, C2, coords, p, spec) <= 1e-10);
    }
}

TEST_CASE("product lemmas: unitarity collapses") {
    Rng rng(600613);
    for (int m : {1, 2}) {
        const RMatrixParams p = sampled_params(rng, m);
        const auto coords = generic_coords(rng, 6, p);
        const LatticeSpec spec = p.lattice(6);
        const IndexSubset I({1, 2}, 1, 6), J({3, 4}, 1, 6);
        CHECK(check_un01(I, J, coords, p, spec) <= 1e-10);
        CHECK(check_un02(I, J, coords, p, spec) <= 1e-10);
        CHECK(check_un03(I, J, coords, p, spec) <= 1e-10);
        const IndexSubset I2({2, 5}, 1, 6), J2({1, 4, 6}, 1, 6);
        CHECK(check_un01(I2, J2, coords, p, spec) <= 1e-10);
        CHECK(check_un02(I2, J2, coords, p, spec) <= 1e-10);
        CHECK(check_un03(I2, J2, coords, p, spec) <= 1e-10);
    }
}

TEST_CASE("product lemmas: moving tails through y-products") {
    Rng rng(171717);
    for (int m : {1, 2}) {
        const RMatrixParams p = sampled_params(rng, m);
        const auto coords = generic_coords(rng, 6, p);
        const LatticeSpec spec = p.lattice(6);
        const IndexSubset I({1, 2}, 1, 6), J({3, 4, 5}, 1, 6);
        for (int b : {3, 4, 5}) CHECK(check_lemma_y1(I, J, b, coords, p, spec) <= 1e-10);
        for (int a : {1, 2}) CHECK(check_lemma_y2(I, J, a, coords, p, spec) <= 1e-10);
        const IndexSubset I2({2, 4, 6}, 1, 6), J2({1, 5}, 1, 6);
        CHECK(check_lemma_y1(I2, J2, 1, coords, p, spec) <= 1e-10);
        CHECK(check_lemma_y2(I2, J2, 4, coords, p, spec) <= 1e-10);
    }
    CHECK_THROWS_AS(check_lemma_y1(IndexSubset({1}, 1, 6), IndexSubset({2}, 1, 6), 3,
                                   {}, RMatrixParams{}, LatticeSpec(1, 6)),
                    std::invalid_argument);
}

TEST_CASE("term enumeration matches the frozen N=2, k=1 expansion") {
    const auto f1 = f1_terms(1, {1, 2}, {3, 4});
    REQUIRE(f1.size() == 2);
    CHECK(f1[0].subset == std::vector<int>{1});
    CHECK(f1[0].plan.site_pairs() == Pairs{{1, 2}, {3, 1}, {4, 1}});
    CHECK(f1[1].plan.site_pairs() == Pairs{{3, 2}, {4, 2}, {2, 1}});

    const auto f2 = f2_terms(1, {1, 2}, {3, 4}, F2Form::rewritten_plus_hbar);
    REQUIRE(f2.size() == 2);
    CHECK(f2[0].plan.site_pairs() == Pairs{{4, 3}, {3, 1}, {3, 2}});
    CHECK(f2[1].plan.site_pairs() == Pairs{{4, 1}, {4, 2}, {3, 4}});
    for (const auto& t : f2)
        for (const auto& f : t.plan.factors) CHECK(f.hbar_sign == +1);
}

TEST_CASE("term enumeration matches the frozen N=3, k=1 expansion") {
    const auto f1 = f1_terms(1, {1, 2, 3}, {4, 5, 6});
    REQUIRE(f1.size() == 3);
    CHECK(f1[0].plan.site_pairs() == Pairs{{1, 2}, {1, 3}, {4, 1}, {5, 1}, {6, 1}});
    CHECK(f1[1].plan.site_pairs() == Pairs{{2, 3}, {4, 2}, {5, 2}, {6, 2}, {2, 1}});
    CHECK(f1[2].plan.site_pairs() == Pairs{{4, 3}, {5, 3}, {6, 3}, {3, 1}, {3, 2}});

    const auto f2 = f2_terms(1, {1, 2, 3}, {4, 5, 6}, F2Form::rewritten_plus_hbar);
    REQUIRE(f2.size() == 3);
    CHECK(f2[0].plan.site_pairs() == Pairs{{5, 4}, {6, 4}, {4, 1}, {4, 2}, {4, 3}});
    CHECK(f2[1].plan.site_pairs() == Pairs{{6, 5}, {5, 1}, {5, 2}, {5, 3}, {4, 5}});
    CHECK(f2[2].plan.site_pairs() == Pairs{{6, 1}, {6, 2}, {6, 3}, {4, 6}, {5, 6}});
}

TEST_CASE("term enumeration matches the frozen N=3, k=2 expansion") {
    const auto f1 = f1_terms(2, {1, 2, 3}, {4, 5, 6});
    REQUIRE(f1.size() == 3);
    CHECK(f1[0].subset == std::vector<int>{1, 2});
    CHECK(f1[0].plan.site_pairs() ==
          Pairs{{2, 3}, {1, 3}, {4, 1}, {5, 1}, {6, 1}, {4, 2}, {5, 2}, {6, 2}});
    CHECK(f1[1].plan.site_pairs() ==
          Pairs{{1, 2}, {4, 1}, {5, 1}, {6, 1}, {4, 3}, {5, 3}, {6, 3}, {3, 2}});
    CHECK(f1[2].plan.site_pairs() ==
          Pairs{{4, 2}, {5, 2}, {6, 2}, {4, 3}, {5, 3}, {6, 3}, {3, 1}, {2, 1}});

    const auto f2 = f2_terms(2, {1, 2, 3}, {4, 5, 6}, F2Form::rewritten_plus_hbar);
    REQUIRE(f2.size() == 3);
    CHECK(f2[0].plan.site_pairs() ==
          Pairs{{6, 5}, {6, 4}, {4, 1}, {4, 2}, {4, 3}, {5, 1}, {5, 2}, {5, 3}});
    CHECK(f2[1].plan.site_pairs() ==
          Pairs{{5, 4}, {4, 1}, {4, 2}, {4, 3}, {6, 1}, {6, 2}, {6, 3}, {5, 6}});
    CHECK(f2[2].plan.site_pairs() ==
          Pairs{{5, 1}, {5, 2}, {5, 3}, {6, 1}, {6, 2}, {6, 3}, {4, 6}, {4, 5}});
}

TEST_CASE("boundary operators G and H: index-range bookkeeping") {
    // N = 1, a = 1, b = 2: both G-products empty
    CHECK(plan_g(1, 2, 1).factors.empty());
    // N = 2, a = 1, b = 3: G = R_{12} R_{43}
    CHECK(plan_g(1, 3, 2).site_pairs() == Pairs{{1, 2}, {4, 3}});
    // H for N = 2, a = 1, b = 3: both R-products empty, H = P_{13}
    CHECK(plan_h_r_part(1, 3, 2).factors.empty());
    // N = 3, a = 1, b = 5: H = R_{4,1} P_{15}
    CHECK(plan_h_r_part(1, 5, 3).site_pairs() == Pairs{{4, 1}});
    CHECK(plan_g(1, 5, 3).site_pairs() == Pairs{{1, 2}, {1, 3}, {6, 5}});

    // eval_h applies the trailing transposition
    Rng rng(5);
    const RMatrixParams p = sampled_params(rng, 2);
    const auto coords = generic_coords(rng, 4, p);
    const LatticeSpec spec = p.lattice(4);
    const Matrix h = eval_h(1, 3, 2, coords, p, spec);
    CHECK(rel_residual(h, permutation_p(1, 3, spec)) <= 1e-14);
}

TEST_CASE("second-sum direct form carries -h factors with unswapped legs") {
    const auto f2 = f2_terms(1, {1, 2}, {3, 4}, F2Form::direct_minus_hbar);
    REQUIRE(f2.size() == 2);
    // J = {3}: rij({3},{4}) then y({1,2},{3}) then rij'({3},{4}) (empty)
    CHECK(f2[0].plan.site_pairs() == Pairs{{3, 4}, {1, 3}, {2, 3}});
    CHECK(f2[1].plan.site_pairs() == Pairs{{1, 4}, {2, 4}, {4, 3}});
    for (const auto& t : f2)
        for (const auto& f : t.plan.factors) CHECK(f.hbar_sign == -1);
    // leg-swapping the direct plans yields exactly the rewritten sequences
    const auto rw = f2_terms(1, {1, 2}, {3, 4}, F2Form::rewritten_plus_hbar);
    for (std::size_t t = 0; t < f2.size(); ++t)
        CHECK(swap_legs(f2[t].plan).site_pairs() == rw[t].plan.site_pairs());
}

TEST_CASE("second-sum forms: direct -h equals rewritten +h") {
    Rng rng(888);
    for (int m : {1, 2}) {
        for (int n : {2, 3}) {
            const RMatrixParams p = sampled_params(rng, m);
            const auto pts = generic_coords(rng, 2 * n, p);
            const SiteAssignment sa(std::vector<cplx>(pts.begin(), pts.begin() + n),
                                    std::vector<cplx>(pts.begin() + n, pts.end()));
            for (int k = 1; k <= n; ++k) CHECK(check_f2_forms(k, sa, p) <= 1e-10);
        }
    }
}

TEST_CASE("first sum boundary case k = N: single term, empty outer products") {
    const auto f1 = f1_terms(2, {1, 2}, {3, 4});
    REQUIRE(f1.size() == 1);
    // I = {1,2} = everything: rij and rij_prime contribute nothing
    CHECK(f1[0].plan.site_pairs() == Pairs{{3, 1}, {4, 1}, {3, 2}, {4, 2}});
}
