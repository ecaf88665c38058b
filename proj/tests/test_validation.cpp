#include <cmath>
#include <functional>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include "hazmix/validation.hpp"

using namespace hazmix;

namespace {

SyntheticFamily family(FamilyTag tag) {
    SyntheticFamily f;
    f.tag = tag;
    return f;
}

double integrate01(const std::function<double(double)>& f) {
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, 1.0, 20, 1e-13);
}

}  // namespace

TEST(SyntheticFamilies, FirstMomentIsTheMeanCurveForBetaLaws) {
    for (FamilyTag tag : {FamilyTag::Beta, FamilyTag::BetaMixture}) {
        const auto fam = family(tag);
        for (double t : SyntheticFamily::grid()) EXPECT_NEAR(analytic_moment(fam, t, 1), fam.s0(t), 1e-15);
    }
}

TEST(SyntheticFamilies, GridIsFiftyPointsFromZero) {
    const auto g = SyntheticFamily::grid();
    ASSERT_EQ(g.size(), 50u);
    EXPECT_EQ(g.front(), 0.0);
    EXPECT_EQ(g.back(), 2.5);
}

TEST(SyntheticFamilies, TruncatedNormalMomentsMatchQuadrature) {
    const auto fam = family(FamilyTag::TruncNormal);
    for (double t : {0.2, 0.7, 1.3, 2.5}) {
        const auto mu = analytic_moments(fam, t, 8);
        for (int r = 0; r <= 8; ++r) {
            const double q = integrate01([&](double s) { return std::pow(s, r) * fam.density(t, s); });
            EXPECT_NEAR(static_cast<double>(mu[r]), q, 1e-9) << "t " << t << " r " << r;
        }
    }
}

TEST(SyntheticFamilies, DensitiesAndCellMassesAreConsistent) {
    for (FamilyTag tag : {FamilyTag::Beta, FamilyTag::BetaMixture, FamilyTag::TruncNormal}) {
        const auto fam = family(tag);
        for (double t : {0.3, 1.5}) {
            EXPECT_NEAR(fam.cell_mass(t, 0.0, 1.0), 1.0, 1e-12);
            const double q = integrate01([&](double s) { return s < 0.4 ? fam.density(t, s) : 0.0; });
            EXPECT_NEAR(fam.cell_mass(t, 0.0, 0.4), q, 1e-6);
        }
    }
}

TEST(L2Study, BetaFamilyIsReconstructedExactly) {
    const auto curve = l2_error_curve(family(FamilyTag::Beta), {2, 6, 10});
    for (const auto& p : curve) {
        EXPECT_LT(p.mean_error, 1e-6) << "N " << p.N;
        EXPECT_EQ(p.rejected, 0u);
    }
}

TEST(L2Study, MixtureErrorDecreasesWithOrder) {
    const auto curve = l2_error_curve(family(FamilyTag::BetaMixture), {2, 4, 10, 20});
    for (std::size_t i = 1; i < curve.size(); ++i) EXPECT_LT(curve[i].mean_error, curve[i - 1].mean_error);
}

TEST(L2Study, ReconstructionReproducesInputMoments) {
    const auto fam = family(FamilyTag::BetaMixture);
    for (double t : {0.1, 0.9, 2.0}) {
        const int N = 10;
        const auto d = reconstruct_family(fam, t, N);
        const auto mu = analytic_moments(fam, t, N);
        // Plain quadrature needs a bounded integrand.
        ASSERT_GT(d.weight().a, 1.0);
        ASSERT_GT(d.weight().b, 1.0);
        for (int r = 0; r <= N; ++r) {
            const double q = integrate01([&](double s) { return std::pow(s, r) * static_cast<double>(d.fN(s)); });
            EXPECT_NEAR(q, static_cast<double>(mu[r]), 1e-8);
        }
    }
}

TEST(IntervalStudy, ApproximateHpdTracksTrueHpd) {
    for (FamilyTag tag : {FamilyTag::Beta, FamilyTag::BetaMixture}) {
        for (const auto& row : interval_comparison(family(tag), 10)) {
            if (row.t == 0.0) continue;  // law concentrated within 1e-6 of s = 1
            EXPECT_NEAR(row.approx_lo, row.true_lo, 0.02) << family_name(tag) << " t " << row.t;
            EXPECT_NEAR(row.approx_hi, row.true_hi, 0.02) << family_name(tag) << " t " << row.t;
        }
    }
}

TEST(IntervalStudy, TrueModeOnlyForTruncatedNormal) {
    EXPECT_THROW((void)family(FamilyTag::Beta).true_mode(1.0), std::logic_error);
    EXPECT_NEAR(family(FamilyTag::TruncNormal).true_mode(1.0), std::exp(-1.0), 1e-15);
}
