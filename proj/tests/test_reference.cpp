#include <doctest.h>

#include "nig/errors.hpp"
#include "nig/reference.hpp"
#include "nig/series.hpp"
#include "nig/tables.hpp"

#include <cmath>
#include <numbers>

using nig::MarketContext;
using nig::NigParams;
using nig::PayoffKind;
using nig::PayoffSpec;

namespace {

const NigParams kSym = nig::benchmark_symmetric();
const NigParams kAsym = nig::benchmark_asymmetric();

MarketContext market(double spot, double tau, double strike = 4000.0) {
    return {spot, strike, 0.01, 0.0, tau, {}, {}};
}

double series(const NigParams& p, const MarketContext& c, PayoffKind kind) {
    nig::SeriesOptions o;
    o.eps = 1e-14;
    return nig::price(p, c, {kind, {}, {}}, o).price;
}

}  // namespace

TEST_CASE("lewis digitals at reference points") {
    const MarketContext c = market(4000.0, 1.0);
    CHECK(std::fabs(nig::lewis_digital(kSym, c, nig::DigitalKind::asset).price - 2313.7110) < 1e-4);
    CHECK(std::fabs(nig::lewis_digital(kAsym, c, nig::DigitalKind::asset).price - 2479.1149) < 1e-4);
    CHECK(std::fabs(nig::lewis_digital(kSym, market(3000.0, 2.0), nig::DigitalKind::cash).price - 0.2095) < 1e-4);
}

TEST_CASE("lewis cash call and put add to the discount factor") {
    for (const NigParams& p : {kSym, kAsym}) {
        for (double spot : {2500.0, 3800.0, 4000.0, 5500.0}) {
            const MarketContext c = market(spot, 0.5);
            const double call = nig::lewis_digital(p, c, nig::DigitalKind::cash).price;
            const double put = nig::lewis_cash_put(p, c).price;
            CHECK(std::fabs(call + put - std::exp(-0.005)) < 1e-10);
        }
    }
}

TEST_CASE("asset digital tends to the discounted spot as the strike vanishes") {
    MarketContext c = market(4000.0, 1.0, 1e-3);
    c.dividend = 0.02;
    const double v = nig::lewis_digital(kAsym, c, nig::DigitalKind::asset).price;
    CHECK(v == doctest::Approx(4000.0 * std::exp(-0.02)).epsilon(1e-9));
}

TEST_CASE("lewis agrees with the series on both sides of the forward") {
    for (const NigParams& p : {kSym, kAsym}) {
        for (double spot : {3300.0, 3800.0, 4000.0, 4400.0, 4800.0}) {
            const MarketContext c = market(spot, 1.0);
            REQUIRE(nig::convergence_gate(p, c).satisfied);
            CHECK(nig::lewis_digital(p, c, nig::DigitalKind::asset).price ==
                  doctest::Approx(series(p, c, PayoffKind::asset_or_nothing_call)).epsilon(1e-9));
            CHECK(std::fabs(nig::lewis_digital(p, c, nig::DigitalKind::cash).price -
                            series(p, c, PayoffKind::cash_or_nothing_call)) < 1e-10);
        }
    }
}

TEST_CASE("carr-madan at a reference point and against the series") {
    const MarketContext c = market(4000.0, 1.0);
    const double a = nig::default_damping(kSym);
    CHECK(std::fabs(nig::carr_madan_integral(kSym, c, a).price - 580.5260) < 1e-4);
    for (double tau : {nig::kOneDay, nig::kOneWeek, nig::kOneMonth, 0.5, 2.0}) {
        const MarketContext m = market(4000.0, tau);
        CHECK(nig::carr_madan_integral(kAsym, m, nig::default_damping(kAsym)).price ==
              doctest::Approx(series(kAsym, m, PayoffKind::european_call)).epsilon(1e-8));
    }
}

TEST_CASE("carr-madan is insensitive to the damping") {
    for (double spot : {3000.0, 4000.0, 5000.0}) {
        const MarketContext c = market(spot, 1.0);
        const double a = nig::default_damping(kSym);
        const double full = nig::carr_madan_integral(kSym, c, a).price;
        const double half = nig::carr_madan_integral(kSym, c, 0.5 * a).price;
        CHECK(std::fabs(full - half) < 1e-6);
    }
}

TEST_CASE("invalid damping is rejected") {
    const MarketContext c = market(4000.0, 1.0);
    CHECK_THROWS_AS(nig::carr_madan_integral(kSym, c, 0.0), nig::DomainError);
    CHECK_THROWS_AS(nig::carr_madan_integral(kSym, c, -0.3), nig::DomainError);
    CHECK_THROWS_AS(nig::carr_madan_integral(kSym, c, kSym.alpha - kSym.beta - 1.0), nig::DomainError);
    nig::FftConfig cfg;
    cfg.damping = 9.0;
    CHECK_THROWS(cfg.validate(kSym));
    cfg.damping = 0.0;
    cfg.eta = -1.0;
    CHECK_THROWS(cfg.validate(kSym));
}

TEST_CASE("fft grid spacing and window") {
    nig::FftConfig cfg;
    cfg.n_points = 4096;
    cfg.eta = 0.25;
    CHECK(cfg.lambda() == doctest::Approx(2.0 * std::numbers::pi / (4096 * 0.25)));
    const nig::FftGrid g = nig::fft_strike_grid(kSym, market(4000.0, 1.0), cfg, 2000.0, 8000.0);
    REQUIRE(g.log_strikes.size() == 4096);
    CHECK(g.log_strikes(1) - g.log_strikes(0) == doctest::Approx(g.lambda));
    CHECK(g.log_strikes(0) == doctest::Approx(-g.lambda * 2048.0));
    // log(4) / lambda points fall in a factor-of-four window
    CHECK(static_cast<double>(g.window.size()) == doctest::Approx(std::log(4.0) / g.lambda).epsilon(0.1));
    for (const auto& [k, v] : g.window) {
        CHECK(k >= 2000.0);
        CHECK(k <= 8000.0);
        CHECK(std::fabs(v - nig::carr_madan_integral(kSym, market(4000.0, 1.0, k), g.damping).price) < 0.05);
    }
}

TEST_CASE("fft window counts on the bench grid") {
    nig::FftConfig cfg;
    cfg.n_points = 500;
    cfg.eta = 0.25;
    const MarketContext c{3000.0, 3000.0, 0.01, 0.0, nig::kOneMonth, {}, {}};
    const NigParams p{40.0, 0.0, 25.0, 0.0};
    CHECK(nig::fft_strike_grid(p, c, cfg, 2000.0, 5000.0).window.size() == 18);
    cfg.n_points = 1000;
    CHECK(nig::fft_strike_grid(p, c, cfg, 2000.0, 5000.0).window.size() == 36);
}

TEST_CASE("block seeds") {
    CHECK(nig::block_seed(1, 0) != nig::block_seed(1, 1));
    CHECK(nig::block_seed(1, 0) != nig::block_seed(2, 0));
    CHECK(nig::block_seed(7, 3) == nig::block_seed(7, 3));
}

TEST_CASE("monte carlo is reproducible and thread independent") {
    const MarketContext c = market(4000.0, 1.0);
    const PayoffSpec eur{PayoffKind::european_call, {}, {}};
    const nig::McResult a = nig::mc_price(kSym, c, eur, 50000, 42, 1);
    const nig::McResult b = nig::mc_price(kSym, c, eur, 50000, 42, 4);
    const nig::McResult d = nig::mc_price(kSym, c, eur, 50000, 42, 0);
    CHECK(a.estimate == b.estimate);
    CHECK(a.std_error == b.std_error);
    CHECK(a.estimate == d.estimate);
    CHECK(a.paths == 50000);
    CHECK(a.ci95_halfwidth == doctest::Approx(1.96 * a.std_error).epsilon(1e-15));
    CHECK(nig::mc_price(kSym, c, eur, 50000, 43, 1).estimate != a.estimate);
}

TEST_CASE("monte carlo against the series for every supported payoff") {
    const std::vector<PayoffSpec> specs = {
        {PayoffKind::asset_or_nothing_call, {}, {}}, {PayoffKind::cash_or_nothing_call, {}, {}},
        {PayoffKind::european_call, {}, {}},         {PayoffKind::log_call, {}, {}},
        {PayoffKind::power_european_call, {}, 1.2},  {PayoffKind::capped_cash_call, 5000.0, {}},
    };
    std::uint64_t seed = 1000;
    for (double spot : {3400.0, 4000.0, 4600.0}) {
        const MarketContext c = market(spot, 2.0);
        for (const PayoffSpec& spec : specs) {
            nig::SeriesOptions o;
            o.eps = 1e-14;
            const double exact = nig::price_sym(kSym, c, spec, o).price;
            const nig::McResult mc = nig::mc_price(kSym, c, spec, 100000, ++seed);
            CHECK(std::fabs(mc.estimate - exact) < 4.0 * mc.std_error);
        }
    }
}

TEST_CASE("monte carlo at the money for log and power calls") {
    const MarketContext c = market(4000.0, 2.0);
    const nig::McResult log_call = nig::mc_price(kSym, c, {PayoffKind::log_call, {}, {}}, 1000, 20200601);
    CHECK(std::fabs(log_call.estimate - 0.1482) < log_call.ci95_halfwidth);
    const nig::McResult power = nig::mc_price(kSym, c, {PayoffKind::power_european_call, {}, 1.2}, 100000, 20200601);
    CHECK(std::fabs(power.estimate - 17847.18) < 3.0 * power.std_error);
}

TEST_CASE("monte carlo rejects unsupported payoffs") {
    CHECK_THROWS_AS(nig::mc_price(kSym, market(4000.0, 1.0), {PayoffKind::gap_call, 3900.0, {}}, 1000, 1),
                    std::invalid_argument);
}
