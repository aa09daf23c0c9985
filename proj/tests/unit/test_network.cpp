#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sfp/network.hpp"
#include "sfp/rng.hpp"

using namespace sfp;

namespace {

const Direction kNorth{{0.0, 0.0, 1.0}};

NetworkParams random_params(int m, std::uint64_t seed, WeightMode mode) {
    TrainingConfig cfg;
    cfg.m = m;
    cfg.seed = seed;
    cfg.mode = mode;
    return init_default(cfg);
}

bool params_equal(const NetworkParams& a, const NetworkParams& b) {
    if (a.m() != b.m()) return false;
    for (std::size_t i = 0; i < a.m(); ++i) {
        if (a.a[i] != b.a[i]) return false;
        if (a.w[i].v.x != b.w[i].v.x || a.w[i].v.y != b.w[i].v.y ||
            a.w[i].v.z != b.w[i].v.z)
            return false;
    }
    return true;
}

}  // namespace

TEST_CASE("forward basics") {
    NetworkParams p;
    p.a = {1.0};
    p.w = {kNorth};
    CHECK(forward(p, {0.0, 0.0}) == doctest::Approx(1.0));
    CHECK(forward(p, {M_PI, 0.0}) == 0.0);
    NetworkParams q;
    q.a = {1.0, -1.0};
    q.w = {kNorth, kNorth};
    Rng rng(2);
    for (int i = 0; i < 20; ++i) {
        const SpherePoint pt{std::acos(rng.uniform(-1.0, 1.0)),
                             rng.uniform(0.0, 2.0 * M_PI)};
        CHECK(forward(q, pt) == 0.0);
    }
}

TEST_CASE("loss hand-computed values") {
    NetworkParams p;
    p.a = {1.0};
    p.w = {kNorth};
    CHECK(loss(p, {{M_PI / 2.0, 0.0}}, TargetFunction::zero()) ==
          doctest::Approx(0.0).epsilon(1e-30));
    p.a = {2.0};
    CHECK(loss(p, {{M_PI / 3.0, 0.0}}, TargetFunction::zero()) ==
          doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-12));
    NetworkParams z;
    z.a = {0.0};
    z.w = {kNorth};
    CHECK(loss(z, {{1.0, 1.0}, {2.0, 2.0}}, TargetFunction::zero()) == 0.0);
    CHECK_THROWS_AS((void)loss(p, {}, TargetFunction::zero()),
                    std::invalid_argument);
}

TEST_CASE("gradient vanishes at zero error") {
    NetworkParams p = random_params(5, 3, WeightMode::trainable_directions);
    for (double& ai : p.a) ai = 0.0;
    const auto samples = sample_uniform(20, 4);
    const Gradients g = gradient(p, samples, TargetFunction::zero());
    for (double d : g.da) CHECK(d == 0.0);
    for (const Vec3& d : g.dw) CHECK(d.norm() == 0.0);
}

TEST_CASE("gradient single-sample hand chain rule") {
    NetworkParams p;
    p.a = {1.5};
    p.w = {kNorth};
    p.mode = WeightMode::trainable_directions;
    const SpherePoint s{M_PI / 3.0, 0.25};
    const TargetFunction h = TargetFunction::zero();
    const Gradients g = gradient(p, {s}, h);
    // u = a z, z = cos(tau); dL/da = 2 (a z) z sin(tau)
    const double z = std::cos(M_PI / 3.0);
    const double st = std::sin(M_PI / 3.0);
    CHECK(g.da[0] == doctest::Approx(2.0 * 1.5 * z * z * st).epsilon(1e-14));
    const Vec3 x = to_cartesian(s);
    const double c = 2.0 * 1.5 * z * st * 1.5;
    CHECK(g.dw[0].x == doctest::Approx(c * x.x).epsilon(1e-14));
    CHECK(g.dw[0].y == doctest::Approx(c * x.y).epsilon(1e-14));
    CHECK(g.dw[0].z == doctest::Approx(c * x.z).epsilon(1e-14));
}

TEST_CASE("gradient matches finite differences away from kinks") {
    Rng seed_rng(100);
    for (int rep = 0; rep < 10; ++rep) {
        NetworkParams p = random_params(20, 1000 + rep, WeightMode::trainable_directions);
        auto samples = sample_uniform(50, 2000 + rep);
        TargetFunction h = TargetFunction::trig_paper();
        const Gradients g = gradient(p, samples, h);
        const double fd_h = 1e-6;

        for (std::size_t i = 0; i < p.m(); ++i) {
            // a-coordinates: loss is exactly quadratic in a, FD is clean.
            NetworkParams pp = p, pm = p;
            pp.a[i] += fd_h;
            pm.a[i] -= fd_h;
            const double fd = (loss(pp, samples, h) - loss(pm, samples, h)) / (2.0 * fd_h);
            const double scale = std::max(std::abs(fd), 1e-6);
            CHECK(std::abs(g.da[i] - fd) / scale < 1e-5);
        }
        // FD on direction coordinates, excluding neurons whose activation
        // pattern could flip under the +-h perturbation. Differences are
        // compared against the gradient's sup norm: the subtraction noise in
        // (lp - lm)/2h sits near 5e-9 absolute, which would swamp a
        // per-coordinate relative test on near-zero entries.
        double sup = 1e-6;
        for (std::size_t i = 0; i < p.m(); ++i)
            sup = std::max({sup, std::abs(g.dw[i].x), std::abs(g.dw[i].y),
                            std::abs(g.dw[i].z)});
        for (std::size_t i = 0; i < p.m(); ++i) {
            bool near_kink = false;
            for (const SpherePoint& s : samples)
                if (std::abs(p.w[i].v.dot(to_cartesian(s))) < 2.0 * fd_h)
                    near_kink = true;
            if (near_kink) continue;
            double* const coords[3] = {&p.w[i].v.x, &p.w[i].v.y, &p.w[i].v.z};
            const double gi[3] = {g.dw[i].x, g.dw[i].y, g.dw[i].z};
            for (int k = 0; k < 3; ++k) {
                const double saved = *coords[k];
                *coords[k] = saved + fd_h;
                const double lp = loss(p, samples, h);
                *coords[k] = saved - fd_h;
                const double lm = loss(p, samples, h);
                *coords[k] = saved;
                const double fd = (lp - lm) / (2.0 * fd_h);
                CHECK(std::abs(gi[k] - fd) / sup < 1e-5);
            }
        }
    }
}

TEST_CASE("init_default determinism and statistics") {
    TrainingConfig cfg;
    cfg.m = 100;
    cfg.seed = 5;
    const NetworkParams a = init_default(cfg);
    const NetworkParams b = init_default(cfg);
    CHECK(params_equal(a, b));
    for (const Direction& w : a.w)
        CHECK(std::abs(w.v.norm() - 1.0) < 1e-12);

    cfg.m = 10000;
    const NetworkParams big = init_default(cfg);
    double mean = 0.0;
    for (double ai : big.a) mean += ai;
    mean /= cfg.m;
    CHECK(std::abs(mean) < 4.0 / cfg.m);  // CLT bound, sigma = 1/sqrt(m)
}

TEST_CASE("init_high_frequency fit quality and determinism") {
    TrainingConfig cfg;
    cfg.m = 100;
    cfg.seed = 1;
    const SphereGrid grid = build_grid(16);
    HighFreqInitReport rep1, rep2;
    const NetworkParams p1 = init_high_frequency(cfg, grid, &rep1);
    const NetworkParams p2 = init_high_frequency(cfg, grid, &rep2);
    CHECK(params_equal(p1, p2));
    CHECK(rep1.rel_l2_error == rep2.rel_l2_error);
    // 100 unit-norm bias-free caps barely reach sin(10 tau) cos(10 phi); the
    // achieved fit is poor but stable. Pinned empirically.
    CHECK(rep1.rel_l2_error > 0.5);
    CHECK(rep1.rel_l2_error <= 0.99);
    CHECK(rep1.ridge == doctest::Approx(1e-8));

    // The reachable part concentrates at high degrees: the largest harmonic
    // magnitude of the initial output sits at ell >= 6.
    const HarmonicSpectrum spec = analytic_network_spectrum(p1, 12);
    int best_l = 0;
    double best = -1.0;
    for (int l = 0; l <= 12; ++l)
        for (int j = -l; j <= l; ++j)
            if (std::abs(spec(l, j)) > best) {
                best = std::abs(spec(l, j));
                best_l = l;
            }
    CHECK(best_l >= 6);
}

TEST_CASE("renormalize_directions") {
    NetworkParams p;
    p.a = {1.0, 1.0};
    p.w = {Direction{{0.0, 0.0, 2.0}}, Direction{{3.0, 4.0, 0.0}}};
    const NetworkParams q = renormalize_directions(p);
    CHECK(q.w[0].v.z == doctest::Approx(1.0));
    CHECK(std::abs(q.w[1].v.norm() - 1.0) < 1e-15);
    CHECK(q.w[1].v.x == doctest::Approx(0.6));
    NetworkParams bad;
    bad.a = {1.0};
    bad.w = {Direction{{0.0, 0.0, 0.0}}};
    CHECK_THROWS_AS((void)renormalize_directions(bad), std::runtime_error);
}

TEST_CASE("train keeps the zero fixed point") {
    TrainingConfig cfg;
    cfg.m = 10;
    cfg.epochs = 50;
    cfg.record_every = 10;
    cfg.seed = 9;
    NetworkParams init = init_default(cfg);
    for (double& ai : init.a) ai = 0.0;
    const TrainResult result = train(cfg, TargetFunction::zero(), init);
    REQUIRE(result.trace.entries.size() == 6);
    for (const TraceEntry& e : result.trace.entries) {
        CHECK(e.loss == 0.0);
        for (double err : e.harmonic_errors) CHECK(err < 1e-12);
    }
    CHECK(params_equal(result.params, init));
}

TEST_CASE("train is deterministic") {
    TrainingConfig cfg;
    cfg.m = 15;
    cfg.epochs = 200;
    cfg.record_every = 50;
    cfg.batch = 5;
    cfg.seed = 77;
    cfg.mode = WeightMode::trainable_directions;
    const TrainResult r1 = train(cfg, TargetFunction::trig_paper());
    const TrainResult r2 = train(cfg, TargetFunction::trig_paper());
    REQUIRE(r1.trace.entries.size() == r2.trace.entries.size());
    for (std::size_t k = 0; k < r1.trace.entries.size(); ++k) {
        CHECK(r1.trace.entries[k].loss == r2.trace.entries[k].loss);
        CHECK(r1.trace.entries[k].sum_a == r2.trace.entries[k].sum_a);
        for (std::size_t i = 0; i < r1.trace.entries[k].harmonic_errors.size(); ++i)
            CHECK(r1.trace.entries[k].harmonic_errors[i] ==
                  r2.trace.entries[k].harmonic_errors[i]);
    }
    CHECK(params_equal(r1.params, r2.params));
}

TEST_CASE("fixed-mode full-batch descent never increases the loss") {
    for (const std::uint64_t seed : {1ull, 2ull, 3ull}) {
        TrainingConfig cfg;
        cfg.m = 10;
        cfg.n_samples = 50;
        cfg.lr = 1e-4;
        cfg.epochs = 1000;
        cfg.record_every = 1;
        cfg.seed = seed;
        const TrainResult r = train(cfg, TargetFunction::trig_paper());
        for (std::size_t k = 1; k < r.trace.entries.size(); ++k)
            CHECK(r.trace.entries[k].loss <=
                  r.trace.entries[k - 1].loss * (1.0 + 1e-12));
    }
}

TEST_CASE("trainable mode preserves unit directions") {
    TrainingConfig cfg;
    cfg.m = 12;
    cfg.epochs = 300;
    cfg.record_every = 100;
    cfg.batch = 1;
    cfg.mode = WeightMode::trainable_directions;
    cfg.seed = 6;
    const TrainResult r = train(cfg, TargetFunction::trig_paper());
    for (const Direction& w : r.params.w)
        CHECK(std::abs(w.v.norm() - 1.0) < 1e-12);
}

TEST_CASE("train validates its configuration") {
    TrainingConfig cfg;
    cfg.lr = 0.0;
    CHECK_THROWS_AS((void)train(cfg, TargetFunction::zero()), std::invalid_argument);
    cfg = {};
    cfg.epochs = 0;
    CHECK_THROWS_AS((void)train(cfg, TargetFunction::zero()), std::invalid_argument);
    cfg = {};
    cfg.record_every = 0;
    CHECK_THROWS_AS((void)train(cfg, TargetFunction::zero()), std::invalid_argument);
}

TEST_CASE("divergence guard aborts with a diagnostic") {
    TrainingConfig cfg;
    cfg.m = 50;
    cfg.lr = 10.0;  // wildly unstable
    cfg.epochs = 5000;
    cfg.record_every = 10;
    cfg.seed = 3;
    const TrainResult r = train(cfg, TargetFunction::trig_paper());
    CHECK(r.trace.diverged);
    CHECK(!r.trace.diagnostic.empty());
    CHECK(r.trace.entries.back().epoch < cfg.epochs);
}

TEST_CASE("analytic spectrum matches grid projection of the network") {
    NetworkParams p = random_params(8, 55, WeightMode::fixed_directions);
    const HarmonicSpectrum analytic = analytic_network_spectrum(p, 8);
    const SphereGrid fine = build_product_grid(256, 129);
    const HarmonicSpectrum projected = project_real(
        [&p](const SpherePoint& q) { return forward(p, q); }, fine, 8);
    for (int l = 0; l <= 8; ++l)
        for (int j = -l; j <= l; ++j)
            CHECK(std::abs(analytic(l, j) - projected(l, j)) < 2e-5);
}

TEST_CASE("fibonacci sampling is available behind the config flag") {
    TrainingConfig cfg;
    cfg.m = 6;
    cfg.epochs = 20;
    cfg.record_every = 10;
    cfg.sampling = SamplingScheme::fibonacci;
    cfg.seed = 1;
    const TrainResult r1 = train(cfg, TargetFunction::trig_paper());
    const TrainResult r1b = train(cfg, TargetFunction::trig_paper());
    CHECK(r1.trace.entries.back().loss == r1b.trace.entries.back().loss);
    // the lattice is seed-independent but the parameter draw is not
    cfg.seed = 99;
    const TrainResult r2 = train(cfg, TargetFunction::trig_paper());
    CHECK(r1.trace.entries.front().loss != r2.trace.entries.front().loss);
}

TEST_CASE("trace records sum_a and C(h)") {
    TrainingConfig cfg;
    cfg.m = 4;
    cfg.epochs = 10;
    cfg.record_every = 5;
    cfg.seed = 30;
    const TrainResult r = train(cfg, TargetFunction::zero());
    CHECK(r.trace.c_of_target == 0.0);
    double sum = 0.0;
    for (double ai : r.params.a) sum += ai;
    CHECK(r.trace.entries.back().sum_a == doctest::Approx(sum).epsilon(1e-15));
}
