#include <random>

#include <gmpxx.h>
#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "regroup/errors.hpp"
#include "regroup/qexact.hpp"

using namespace regroup;

namespace {

const QuadNum kSqrt2 = QuadNum::sqrt2();
const QuadNum kSqrt7 = QuadNum::sqrt7();
const QuadNum kSqrt14 = QuadNum::sqrt14();

QuadNum q(long a, long b = 0, long c = 0, long d = 0) {
    return QuadNum(mpq_class(a), mpq_class(b), mpq_class(c), mpq_class(d));
}

QuadNum random_quad(std::mt19937_64& rng) {
    std::uniform_int_distribution<long> num(-50, 50);
    std::uniform_int_distribution<long> den(1, 12);
    auto r = [&] { return mpq_class(num(rng), den(rng)); };
    return QuadNum(r(), r(), r(), r());
}

// 50 significant digits of a + b sqrt2 + c sqrt7 + d sqrt14, via GMP floats.
int sign_by_mpf(const QuadNum& u) {
    const mp_bitcnt_t bits = 200;
    mpf_class s2(2, bits), s7(7, bits), s14(14, bits);
    s2 = sqrt(s2);
    s7 = sqrt(s7);
    s14 = sqrt(s14);
    mpf_class v(u.a(), bits);
    v += mpf_class(u.b(), bits) * s2;
    v += mpf_class(u.c(), bits) * s7;
    v += mpf_class(u.d(), bits) * s14;
    return sgn(v);
}

}  // namespace

TEST(QuadArith, BasisProducts) {
    EXPECT_EQ(quad_arith(QuadOp::Mul, kSqrt2, kSqrt7), q(0, 0, 0, 1));
    EXPECT_EQ(quad_arith(QuadOp::Mul, kSqrt2, kSqrt2), QuadNum(2));
    EXPECT_EQ(kSqrt7 * kSqrt7, QuadNum(7));
    EXPECT_EQ(kSqrt14 * kSqrt14, QuadNum(14));
    EXPECT_EQ(kSqrt2 * kSqrt14, q(0, 0, 2, 0));
    EXPECT_EQ(kSqrt7 * kSqrt14, q(0, 7, 0, 0));
}

TEST(QuadArith, ReciprocalOfSqrt7) {
    QuadNum r = quad_arith(QuadOp::Div, QuadNum(1), kSqrt7);
    EXPECT_EQ(r, QuadNum(0, 0, mpq_class(1, 7), 0));
    EXPECT_EQ(r * r, QuadNum(mpq_class(1, 7)));
}

TEST(QuadArith, DivisionByZero) {
    EXPECT_THROW(quad_arith(QuadOp::Div, kSqrt2, QuadNum(0)), DivisionByZero);
    EXPECT_THROW(QuadNum(0).reciprocal(), DivisionByZero);
}

TEST(QuadArith, Canonical) {
    QuadNum u(mpq_class(2, 4), mpq_class(-3, 6), 0, 0);
    EXPECT_EQ(u.a(), mpq_class(1, 2));
    EXPECT_EQ(u.a().get_den(), 2);
    EXPECT_EQ(u.b(), mpq_class(-1, 2));
    EXPECT_TRUE(QuadNum(5).is_rational());
    EXPECT_FALSE(kSqrt14.is_rational());
}

TEST(QuadArith, FieldLaws) {
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 1000; ++i) {
        QuadNum u = random_quad(rng), v = random_quad(rng), w = random_quad(rng);
        ASSERT_EQ((u + v) + w, u + (v + w));
        ASSERT_EQ((u * v) * w, u * (v * w));
        ASSERT_EQ(u * (v + w), u * v + u * w);
        ASSERT_EQ(u * v, v * u);
        ASSERT_EQ(u - u, QuadNum(0));
        if (!u.is_zero()) {
            ASSERT_EQ(u * u.reciprocal(), QuadNum(1));
            ASSERT_EQ((v / u) * u, v);
        }
    }
}

TEST(QuadArith, ConjugatesAreAutomorphisms) {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 200; ++i) {
        QuadNum u = random_quad(rng), v = random_quad(rng);
        ASSERT_EQ((u * v).conj2(), u.conj2() * v.conj2());
        ASSERT_EQ((u * v).conj7(), u.conj7() * v.conj7());
        QuadNum n = u * u.conj2() * u.conj7() * u.conj2().conj7();
        ASSERT_TRUE(n.is_rational());
    }
}

TEST(QuadSign, Examples) {
    EXPECT_EQ(quad_sign(QuadNum(0)), 0);
    QuadNum eps = QuadNum(1) / kSqrt7;
    QuadNum quarter_diag = QuadNum(1) / (QuadNum(2) * kSqrt2);
    // 1/7 > 1/8 and both are positive, so 1/sqrt7 > 1/(2 sqrt2).
    EXPECT_EQ(quad_sign(eps - quarter_diag), +1);
    EXPECT_EQ(quad_sign(quarter_diag - eps), -1);
    EXPECT_EQ(quad_sign((QuadNum(2) - kSqrt2) - (QuadNum(2) - kSqrt2)), 0);
}

TEST(QuadSign, EpsilonBounds) {
    QuadNum eps = QuadNum(1) / kSqrt7;
    EXPECT_EQ(quad_sign(eps), +1);
    EXPECT_EQ(quad_sign(QuadNum(1) / (QuadNum(2) * kSqrt2) - eps), -1);
    EXPECT_LT(QuadNum(0), eps);
}

TEST(QuadSign, AgreesWithHighPrecision) {
    std::mt19937_64 rng(50);
    for (int i = 0; i < 1000; ++i) {
        QuadNum u = random_quad(rng);
        if (u.is_zero()) continue;
        ASSERT_EQ(quad_sign(u), sign_by_mpf(u)) << u.to_string();
    }
}

TEST(QuadSign, NearCancellation) {
    // 99^2 * 2 = 19602 = 140^2 + 2, so 99 sqrt2 - 140 is a tiny positive number.
    EXPECT_EQ(quad_sign(QuadNum(0, 99, 0, 0) - QuadNum(140)), +1);
    // 127^2 * 7 = 112903 and 336^2 = 112896: 127 sqrt7 - 336 > 0, and
    // sqrt14 * 4801 vs 17964 is 4801^2 * 14 = 322694414 < 17964^2 = 322705296.
    EXPECT_EQ(quad_sign(QuadNum(0, 0, 127, 0) - QuadNum(336)), +1);
    EXPECT_EQ(quad_sign(QuadNum(0, 0, 0, 4801) - QuadNum(17964)), -1);
    QuadNum tiny = QuadNum(0, 99, 0, 0) - QuadNum(140);
    EXPECT_EQ(quad_sign(tiny * tiny * tiny * tiny - QuadNum(0, 0, 0, 1) * tiny * tiny * tiny * tiny), -1);
}

TEST(QuadJson, ExactFractions) {
    nlohmann::json j = QuadNum(mpq_class(-3, 4), 0, mpq_class(1, 7), 2);
    EXPECT_EQ(j.dump(), "[[-3,4],[0,1],[1,7],[2,1]]");
}

TEST(Interval, RequiresIrrationalOrderedEndpoints) {
    EXPECT_THROW(QClopenInterval(QuadNum(0), kSqrt2), std::invalid_argument);
    EXPECT_THROW(QClopenInterval(kSqrt7, kSqrt2), std::invalid_argument);
    QClopenInterval i(kSqrt2, kSqrt7);
    EXPECT_TRUE(i.contains(QuadNum(2)));
    EXPECT_FALSE(i.contains(QuadNum(3)));
    auto m = i.middle_third();
    EXPECT_TRUE(m.inside_open(i.lo(), i.hi()));
    EXPECT_EQ(m.width() * QuadNum(3), i.width());
}

TEST(Affine, EndpointsMapExactly) {
    QClopenInterval s(-kSqrt2, kSqrt2), t(QuadNum(1) - kSqrt7, QuadNum(1) + kSqrt7);
    AffinePiece p(s, t);
    EXPECT_EQ(p.apply(s.lo()), t.lo());
    EXPECT_EQ(p.apply(s.hi()), t.hi());
    EXPECT_EQ(p.apply_inverse(t.hi()), s.hi());
    EXPECT_GT(p.slope(), QuadNum(0));
    EXPECT_THROW(p.image(t), std::domain_error);
}

TEST(Build, StepOneDomains) {
    ExampleMap m = build_example(1);
    QuadNum eps = QuadNum(1) / kSqrt7;
    QuadNum r = QuadNum(1) / (QuadNum(2) * kSqrt2);
    EXPECT_EQ(m.eps, eps);
    EXPECT_EQ(m.g.at(1).source(), QClopenInterval(-r, r));
    EXPECT_EQ(m.g.at(1).target(), QClopenInterval(QuadNum(1) - eps, QuadNum(1) + eps));
    EXPECT_EQ(m.g.at(-1).source(), QClopenInterval(QuadNum(-1) - eps, QuadNum(-1) + eps));
    EXPECT_EQ(m.g.size(), 2u);
    EXPECT_TRUE(m.A.empty());
}

TEST(Build, StepTwoDomainInsideLevelOne) {
    ExampleMap m = build_example(2);
    EXPECT_TRUE(m.g.at(2).source().inside(m.level(1)));
    EXPECT_TRUE(m.g.at(-2).target().inside(m.level(-1)));
}

TEST(Build, DepthLimits) {
    EXPECT_THROW(build_example(9), DepthCapExceeded);
    EXPECT_THROW(build_example(99), DepthCapExceeded);
    EXPECT_THROW(build_example(0), std::invalid_argument);
    EXPECT_NO_THROW(build_example(8));
}

TEST(Build, EveryEndpointIrrational) {
    ExampleMap m = build_example(5);
    for (const auto& [k, p] : m.g) {
        EXPECT_FALSE(p.source().lo().is_rational());
        EXPECT_FALSE(p.source().hi().is_rational());
    }
    for (const auto& [k, a] : m.A) EXPECT_FALSE(a.lo().is_rational());
    for (const auto& [k, b] : m.B) EXPECT_FALSE(b.hi().is_rational());
}

TEST(Disjoint, AllDepths) {
    for (int depth = 1; depth <= 8; ++depth) {
        EXPECT_TRUE(check_domains_disjoint(build_example(depth))) << depth;
    }
}

TEST(Disjoint, DetectsOverlap) {
    ExampleMap m = build_example(3);
    ExampleMap bad = m.with_A(1, m.g.at(2).source().middle_third());
    EXPECT_FALSE(check_domains_disjoint(bad));
}

TEST(P123, AllLevelsAllDepths) {
    for (int depth = 2; depth <= 8; ++depth) {
        ExampleMap m = build_example(depth);
        for (int n = 1; n < depth; ++n) EXPECT_TRUE(check_P123(m, n).pass()) << depth << "/" << n;
    }
}

TEST(P123, Examples) {
    ExampleMap m = build_example(4);
    EXPECT_TRUE(check_P123(m, 1).pass());
    EXPECT_TRUE(check_P123(m, 3).pass());
    EXPECT_THROW(check_P123(m, 4), DepthCapExceeded);
    EXPECT_THROW(check_P123(m, 0), DepthCapExceeded);
}

TEST(P123, NegativeControlP1) {
    ExampleMap m = build_example(4);
    ExampleMap bad = m.with_A(2, m.g.at(3).source().middle_third());
    auto r = check_P123(bad, 2);
    EXPECT_FALSE(r.p1);
    EXPECT_FALSE(r.pass());
}

TEST(P123, NegativeControlP3) {
    // A_n equal to the chain image of B_n is exactly what P3 forbids.
    ExampleMap m = build_example(3);
    QClopenInterval image = m.B.at(1);
    for (int k = -1; k >= -1; --k) image = m.g.at(k).image(image);
    image = m.g.at(1).image(image);
    auto r = check_P123(m.with_A(1, image), 1);
    EXPECT_FALSE(r.p3);
}

TEST(ApplyG, Examples) {
    ExampleMap m = build_example(4);
    EXPECT_EQ(apply_g(m, QuadNum(0)), QuadNum(1));
    EXPECT_THROW(apply_g(m, QuadNum(100)), OutsideDomain);
    QuadNum x = m.A.at(1).midpoint();
    EXPECT_TRUE(m.B.at(1).contains(apply_g(m, x)));
    EXPECT_EQ(locate_piece(m, x), 1001);
}

TEST(ApplyG, RationalInA1LandsInB1) {
    ExampleMap m = build_example(4);
    const auto& a = m.A.at(1);
    // A rational strictly inside A_1: a dyadic approximation of its midpoint.
    mpq_class mid(static_cast<long>(a.midpoint().to_double() * (1L << 40)), 1L << 40);
    ASSERT_TRUE(a.contains(QuadNum(mid)));
    EXPECT_TRUE(m.B.at(1).contains(apply_g(m, QuadNum(mid))));
}

TEST(StarWitness, CertifiedForAllLevels) {
    ExampleMap m = build_example(7);
    for (int n = 1; n <= 6; ++n) {
        auto w = star_witness(m, n);
        EXPECT_EQ(w.m, n);
        EXPECT_TRUE(w.certified()) << n;
        EXPECT_EQ(w.forward_image, m.level(n));
        EXPECT_EQ(w.backward_image, m.level(-n));
        EXPECT_TRUE(w.b.inside(w.backward_image));
    }
}

TEST(StarWitness, Errors) {
    ExampleMap m = build_example(3);
    EXPECT_NO_THROW(star_witness(m, 1));
    EXPECT_NO_THROW(star_witness(m, 2));
    EXPECT_THROW(star_witness(m, 3), DepthCapExceeded);
    EXPECT_THROW(star_witness(m, 0), std::invalid_argument);
}

TEST(PeriodicScan, Midpoints) {
    auto r = no_periodic_scan(build_example(4), 8);
    EXPECT_EQ(r.periodic, 0u);
    EXPECT_TRUE(r.pass());
    EXPECT_EQ(r.points, r.exited + r.survived);
}

TEST(PeriodicScan, OrbitFromDomG1ClimbsAndExits) {
    ExampleMap m = build_example(4);
    auto r = no_periodic_scan(m, 8, {QuadNum(0)});
    EXPECT_EQ(r.exited, 1u);
    QuadNum x(0);
    for (int k = 1; k <= 4; ++k) {
        x = apply_g(m, x);
        EXPECT_EQ(x, QuadNum(k));  // midpoints of levels map to midpoints
    }
    EXPECT_THROW(apply_g(m, x), OutsideDomain);
}

TEST(PeriodicScan, EmptyIsVacuous) {
    auto r = no_periodic_scan(build_example(2), 8, {});
    EXPECT_TRUE(r.pass());
    EXPECT_EQ(r.points, 0u);
}

TEST(PeriodicScan, DetectsPlantedCycle) {
    // h_1 swapped to map A_1 onto the chain preimage of itself closes a loop.
    ExampleMap m = build_example(3);
    const auto& a = m.A.at(1);
    QClopenInterval pre = m.g.at(1).preimage(a);
    pre = m.g.at(-1).preimage(pre);
    ExampleMap bad = m;
    bad.B.insert_or_assign(1, pre);
    bad.h.insert_or_assign(1, AffinePiece(a, pre));
    auto r = no_periodic_scan(bad, 8, {a.midpoint()});
    EXPECT_EQ(r.periodic, 1u);
}

TEST(ExampleJson, ExactEndpoints) {
    nlohmann::json j = build_example(2);
    auto dumped = j.dump();
    EXPECT_NE(dumped.find("[1,7]"), std::string::npos);  // eps = sqrt7 / 7
    EXPECT_EQ(j["depth"], 2);
}
