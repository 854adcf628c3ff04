#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <span>
#include <vector>

#include "sfvq/datasets.hpp"
#include "sfvq/errors.hpp"
#include "sfvq/quantizer.hpp"
#include "test_util.hpp"

using namespace sfvq;
using sfvq_test::random_codebook;
using sfvq_test::random_vectors;

namespace {

// Loss of Eq-style objective with the assignment held fixed, for finite
// differencing: j[i] and lambdas are constants, only the codewords vary.
double frozen_loss(const VectorSet& batch, const Codebook& cb,
                   std::span<const double> lambdas,
                   const std::vector<std::size_t>& segments) {
    double loss = 0.0;
    for (std::size_t i = 0; i < batch.count; ++i) {
        const std::size_t j = segments[i];
        const double l = lambdas[j];
        const double* a = cb.word(j);
        const double* b = cb.word(j + 1);
        double sq = 0.0;
        for (std::size_t d = 0; d < batch.dim; ++d) {
            const double e = batch.row(i)[d] - ((1.0 - l) * a[d] + l * b[d]);
            sq += e * e;
        }
        loss += sq;
    }
    return loss / static_cast<double>(batch.count);
}

} // namespace

TEST_CASE("norm-sorted init with one sample per group returns the samples") {
    VectorSet data(2, 4);
    for (std::size_t i = 0; i < 4; ++i)
        data.row(i)[0] = static_cast<double>(i + 1);
    const Codebook cb = init_norm_sorted(data, 4);
    REQUIRE(cb.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(cb.word(i)[0] == static_cast<double>(i + 1));
        CHECK(cb.word(i)[1] == 0.0);
    }
}

TEST_CASE("norm-sorted init averages pairwise groups") {
    // norms {1,1,2,2,3,3,4,4} along +x, shuffled on input
    const double norms[8] = {3, 1, 4, 2, 2, 4, 1, 3};
    VectorSet data(2, 8);
    for (std::size_t i = 0; i < 8; ++i)
        data.row(i)[0] = norms[i];
    const Codebook cb = init_norm_sorted(data, 4);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(cb.word(i)[0] == doctest::Approx(static_cast<double>(i + 1)));
        CHECK(cb.word(i)[1] == 0.0);
    }
}

TEST_CASE("norm-sorted init matches the sort-and-mean oracle") {
    std::mt19937_64 rng(11);
    DistributionParams p;
    p.kind = DistributionKind::Gaussian;
    p.gaussian_dim = 3;
    const VectorSet data = generate(p, 1000, 5);
    const Codebook cb = init_norm_sorted(data, 4);

    // oracle over the same sample
    std::vector<std::size_t> idx(data.count);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return norm(data.row(a), 3) < norm(data.row(b), 3);
    });
    for (std::size_t g = 0; g < 4; ++g) {
        double mean[3] = {0, 0, 0};
        for (std::size_t s = g * 250; s < (g + 1) * 250; ++s)
            for (int d = 0; d < 3; ++d)
                mean[d] += data.row(idx[s])[d];
        for (int d = 0; d < 3; ++d)
            CHECK(cb.word(g)[d] == doctest::Approx(mean[d] / 250.0).epsilon(1e-12));
    }

    // group-mean norms come out non-decreasing for this cloud
    for (std::size_t i = 0; i + 1 < 4; ++i)
        CHECK(norm(cb.word(i), 3) <= norm(cb.word(i + 1), 3));
}

TEST_CASE("norm-sorted init needs enough data") {
    VectorSet data(2, 3);
    CHECK_THROWS_AS(init_norm_sorted(data, 4), InvalidArgument);
}

TEST_CASE("random init is deterministic per seed") {
    const Codebook a = init_random(4, 2, 1);
    const Codebook b = init_random(4, 2, 1);
    CHECK(a.data == b.data);
    const Codebook c = init_random(4, 2, 2);
    CHECK(a.data != c.data);
}

TEST_CASE("random init norms concentrate at sqrt(dim) in high dimension") {
    const Codebook cb = init_random(4, 512, 1);
    double mean_sq = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        double sq = 0.0;
        for (std::size_t d = 0; d < 512; ++d)
            sq += cb.word(i)[d] * cb.word(i)[d];
        // chi-squared with 512 dof: std = sqrt(2*512) = 32, so a 3.5-sigma
        // band per codeword
        CHECK(sq > 512.0 - 3.5 * 32.0);
        CHECK(sq < 512.0 + 3.5 * 32.0);
        mean_sq += sq / 4.0;
    }
    CHECK(mean_sq > 512.0 * 0.85);
    CHECK(mean_sq < 512.0 * 1.15);
}

TEST_CASE("random init shape contract holds in the smallest case") {
    const Codebook cb = init_random(2, 1, 99);
    REQUIRE(cb.size() == 2);
    CHECK(std::isfinite(cb.word(0)[0]));
    CHECK(std::isfinite(cb.word(1)[0]));
}

TEST_CASE("dithered assignment picks the closest interpolated entry") {
    Codebook cb(2, 3);
    cb.word(1)[0] = 1.0;
    cb.word(2)[0] = 1.0;
    cb.word(2)[1] = 1.0;
    const DitheredCodebook dc(cb, {0.5, 0.5});

    VectorSet batch(2, 1);
    batch.row(0)[0] = 0.4;
    batch.row(0)[1] = 0.1;

    // exhaustive oracle over both entries
    const double e0[2] = {0.5, 0.0};
    const double e1[2] = {1.0, 0.5};
    const double d0 = squared_distance(batch.row(0), e0, 2);
    const double d1 = squared_distance(batch.row(0), e1, 2);
    REQUIRE(d0 < d1);

    const auto assigns = assign_dithered(batch, dc);
    REQUIRE(assigns.size() == 1);
    CHECK(assigns[0].segment == 0);
    CHECK(assigns[0].lambda == 0.5);
    CHECK(assigns[0].reconstruction[0] == 0.5);
    CHECK(assigns[0].reconstruction[1] == 0.0);
    CHECK(assigns[0].squared_error == doctest::Approx(d0));
}

TEST_CASE("a sample equal to a dithered entry has zero error") {
    Codebook cb(1, 2);
    cb.word(1)[0] = 1.0;
    const DitheredCodebook dc(cb, {0.25});
    VectorSet batch(1, 1);
    batch.row(0)[0] = 0.25;
    const auto assigns = assign_dithered(batch, dc);
    CHECK(assigns[0].squared_error == 0.0);
}

TEST_CASE("dithered ties break toward the lower segment") {
    Codebook cb(1, 3);
    cb.word(1)[0] = 1.0;
    cb.word(2)[0] = 2.0;
    const DitheredCodebook dc(cb, {0.5, 0.5}); // entries at 0.5 and 1.5
    VectorSet batch(1, 1);
    batch.row(0)[0] = 1.0; // equidistant
    const auto assigns = assign_dithered(batch, dc);
    CHECK(assigns[0].segment == 0);
}

TEST_CASE("dithered assignment checks dimensions") {
    Codebook cb(2, 2);
    const DitheredCodebook dc(cb, {0.5});
    VectorSet batch(3, 1);
    CHECK_THROWS_AS(assign_dithered(batch, dc), DimensionError);
}

TEST_CASE("loss and gradient match the hand-evaluated 1D example") {
    Codebook cb(1, 2);
    cb.word(1)[0] = 1.0;
    VectorSet batch(1, 1);
    batch.row(0)[0] = 0.7;
    const std::vector<double> lambdas{0.5};
    const LossGrad lg = sfvq_loss_grad(batch, cb, lambdas);
    CHECK(lg.loss == doctest::Approx(0.04));
    CHECK(lg.grads[0] == doctest::Approx(-0.2));
    CHECK(lg.grads[1] == doctest::Approx(-0.2));
}

TEST_CASE("perfect reconstruction gives zero loss and zero gradients") {
    Codebook cb(2, 3);
    cb.word(1)[0] = 1.0;
    cb.word(2)[0] = 2.0;
    VectorSet batch(2, 1); // equals codeword 0 with lambda 0
    const std::vector<double> lambdas{0.0, 0.0};
    const LossGrad lg = sfvq_loss_grad(batch, cb, lambdas);
    CHECK(lg.loss == 0.0);
    for (double g : lg.grads)
        CHECK(g == 0.0);
}

TEST_CASE("duplicating every batch sample changes nothing") {
    std::mt19937_64 rng(3);
    const Codebook cb = random_codebook(4, 3, rng);
    const VectorSet batch = random_vectors(5, 3, rng);
    VectorSet doubled(3, 10);
    for (std::size_t i = 0; i < 5; ++i) {
        std::copy(batch.row(i), batch.row(i) + 3, doubled.row(2 * i));
        std::copy(batch.row(i), batch.row(i) + 3, doubled.row(2 * i + 1));
    }
    const std::vector<double> lambdas{0.3, 0.6, 0.9};
    const LossGrad a = sfvq_loss_grad(batch, cb, lambdas);
    const LossGrad b = sfvq_loss_grad(doubled, cb, lambdas);
    CHECK(a.loss == doctest::Approx(b.loss).epsilon(1e-12));
    for (std::size_t i = 0; i < a.grads.size(); ++i)
        CHECK(a.grads[i] == doctest::Approx(b.grads[i]).epsilon(1e-12));
}

TEST_CASE("analytic gradients match central finite differences") {
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<std::size_t> pick_n(2, 8);
    std::uniform_int_distribution<std::size_t> pick_dim(1, 5);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const double h = 1e-3;

    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = pick_n(rng);
        const std::size_t dim = pick_dim(rng);
        Codebook cb = random_codebook(n, dim, rng);
        const VectorSet batch = random_vectors(6, dim, rng);
        std::vector<double> lambdas(n - 1);
        for (double& l : lambdas)
            l = u01(rng);

        const LossGrad lg = sfvq_loss_grad(batch, cb, lambdas);

        // freeze the assignment, then central-difference every coordinate
        const auto assigns = assign_dithered(batch, DitheredCodebook(cb, lambdas));
        std::vector<std::size_t> segments(batch.count);
        for (std::size_t i = 0; i < batch.count; ++i)
            segments[i] = assigns[i].segment;

        for (std::size_t p = 0; p < cb.data.size(); ++p) {
            Codebook plus = cb, minus = cb;
            plus.data[p] += h;
            minus.data[p] -= h;
            const double fd = (frozen_loss(batch, plus, lambdas, segments) -
                               frozen_loss(batch, minus, lambdas, segments)) /
                              (2.0 * h);
            const double scale = std::max({std::abs(fd), std::abs(lg.grads[p]), 1e-8});
            CHECK(std::abs(fd - lg.grads[p]) / scale < 1e-4);
        }
    }
}

TEST_CASE("per-sample dithering agrees with shared lambdas when rows repeat") {
    std::mt19937_64 rng(23);
    const Codebook cb = random_codebook(5, 2, rng);
    const VectorSet batch = random_vectors(7, 2, rng);
    const std::vector<double> lambdas{0.1, 0.4, 0.7, 0.95};
    VectorSet rows(4, 7);
    for (std::size_t i = 0; i < 7; ++i)
        std::copy(lambdas.begin(), lambdas.end(), rows.row(i));
    const LossGrad a = sfvq_loss_grad(batch, cb, lambdas);
    const LossGrad b = sfvq_loss_grad_per_sample(batch, cb, rows);
    CHECK(a.loss == doctest::Approx(b.loss).epsilon(1e-12));
    for (std::size_t i = 0; i < a.grads.size(); ++i)
        CHECK(a.grads[i] == doctest::Approx(b.grads[i]).epsilon(1e-12));
}

TEST_CASE("vq gradient moves only the selected codeword") {
    Codebook cb(1, 2);
    cb.word(1)[0] = 2.0;
    VectorSet batch(1, 1);
    batch.row(0)[0] = 0.5; // nearest codeword 0
    const LossGrad lg = vq_loss_grad(batch, cb);
    CHECK(lg.loss == doctest::Approx(0.25));
    CHECK(lg.grads[0] == doctest::Approx(-1.0)); // -2 * (0.5 - 0)
    CHECK(lg.grads[1] == 0.0);
}

TEST_CASE("expansion applies the 0.99/0.01 rule plus the tail rule") {
    Codebook cb(2, 2);
    cb.word(1)[0] = 1.0;
    const Codebook out = expand(cb);
    REQUIRE(out.size() == 4);
    CHECK(out.word(0)[0] == 0.0);
    CHECK(out.word(1)[0] == doctest::Approx(0.01));
    CHECK(out.word(2)[0] == doctest::Approx(0.99));
    CHECK(out.word(3)[0] == 1.0);
}

TEST_CASE("expansion doubles the size and keeps points on old segments") {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 2 + trial;
        const Codebook cb = random_codebook(n, 3, rng);
        const Codebook out = expand(cb);
        REQUIRE(out.size() == 2 * n);

        // originals appear in order at the even slots except the tail pair
        for (std::size_t i = 0; i + 1 < n; ++i)
            for (std::size_t d = 0; d < 3; ++d)
                CHECK(out.word(2 * i)[d] == cb.word(i)[d]);

        // every inserted point solves p = (1-t) c_i + t c_{i+1} with
        // t in {0.01, 0.99} on some segment
        for (std::size_t k = 0; k < out.size(); ++k) {
            bool is_original = false;
            for (std::size_t i = 0; i < n && !is_original; ++i)
                is_original = std::equal(cb.word(i), cb.word(i) + 3, out.word(k));
            if (is_original)
                continue;
            bool explained = false;
            for (std::size_t i = 0; i + 1 < n && !explained; ++i) {
                for (double t : {0.01, 0.99}) {
                    double err = 0.0;
                    for (std::size_t d = 0; d < 3; ++d) {
                        const double expect =
                            (1.0 - t) * cb.word(i)[d] + t * cb.word(i + 1)[d];
                        err += std::abs(expect - out.word(k)[d]);
                    }
                    if (err < 1e-12)
                        explained = true;
                }
            }
            CHECK(explained);
        }
    }
}

TEST_CASE("expansion rejects degenerate codebooks") {
    Codebook cb(2, 1);
    CHECK_THROWS_AS(expand(cb), InvalidArgument);
}

TEST_CASE("expansion preserves mean segment distortion") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 5; ++trial) {
        const Codebook cb = random_codebook(8, 2, rng);
        const VectorSet data = random_vectors(200, 2, rng);
        const double before = mean_distortion_segment(data, cb);
        const double after = mean_distortion_segment(data, expand(cb));
        CHECK(std::abs(before - after) <= 1e-6 * std::max(before, 1e-30));
    }
}

TEST_CASE("nearest quantization matches hand arithmetic") {
    Codebook cb(1, 2);
    cb.word(1)[0] = 2.0;
    const double x = 0.9;
    const auto r = quantize_nearest(std::span(&x, 1), cb);
    CHECK(r.index == 0);
    CHECK(r.squared_error == doctest::Approx(0.81));

    Codebook cb3(2, 4);
    for (std::size_t i = 0; i < 4; ++i)
        cb3.word(i)[0] = static_cast<double>(i);
    const double x3[2] = {2.0, 0.0}; // equals codeword 2
    const auto r3 = quantize_nearest(std::span(x3, 2), cb3);
    CHECK(r3.index == 2);
    CHECK(r3.squared_error == 0.0);

    const double mid = 0.5; // equidistant between codewords 0 and 1 (1D {0,1})
    Codebook cb2(1, 2);
    cb2.word(1)[0] = 1.0;
    CHECK(quantize_nearest(std::span(&mid, 1), cb2).index == 0);
}

TEST_CASE("segment quantization projects and clamps") {
    Codebook cb(2, 2);
    cb.word(1)[0] = 1.0;

    const double x[2] = {0.5, 0.3};
    const auto a = quantize_segment(std::span(x, 2), cb);
    CHECK(a.segment == 0);
    CHECK(a.lambda == doctest::Approx(0.5));
    CHECK(a.reconstruction[0] == doctest::Approx(0.5));
    CHECK(a.reconstruction[1] == 0.0);
    CHECK(a.squared_error == doctest::Approx(0.09));

    const double beyond[2] = {2.0, 0.0};
    const auto b = quantize_segment(std::span(beyond, 2), cb);
    CHECK(b.lambda == 1.0);
    CHECK(b.reconstruction[0] == 1.0);
}

TEST_CASE("segment quantization agrees with a dense lambda grid") {
    std::mt19937_64 rng(37);
    const Codebook cb = random_codebook(6, 3, rng);
    for (int trial = 0; trial < 50; ++trial) {
        const VectorSet xs = random_vectors(1, 3, rng, -1.5, 1.5);
        const double* x = xs.row(0);
        const auto got = quantize_segment(std::span(x, 3), cb);

        std::size_t best_seg = 0;
        double best_lambda = 0.0;
        double best_sq = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j + 1 < cb.size(); ++j) {
            for (int g = 0; g <= 1000; ++g) {
                const double l = g / 1000.0;
                double sq = 0.0;
                for (std::size_t d = 0; d < 3; ++d) {
                    const double e =
                        x[d] - ((1.0 - l) * cb.word(j)[d] + l * cb.word(j + 1)[d]);
                    sq += e * e;
                }
                if (sq < best_sq) {
                    best_sq = sq;
                    best_seg = j;
                    best_lambda = l;
                }
            }
        }
        CHECK(got.segment == best_seg);
        CHECK(std::abs(got.lambda - best_lambda) <= 1e-3);
        CHECK(std::abs(got.squared_error - best_sq) <= 1e-4);
    }
}

TEST_CASE("segment error never exceeds nearest-codeword error") {
    std::mt19937_64 rng(41);
    const Codebook cb = random_codebook(8, 2, rng);
    for (int trial = 0; trial < 200; ++trial) {
        const VectorSet xs = random_vectors(1, 2, rng, -2.0, 2.0);
        const double* x = xs.row(0);
        const auto seg = quantize_segment(std::span(x, 2), cb);
        const auto near = quantize_nearest(std::span(x, 2), cb);
        CHECK(seg.squared_error <= near.squared_error + 1e-15);
    }
}

TEST_CASE("any fixed dither never beats the closed-form projection") {
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const Codebook cb = random_codebook(6, 2, rng);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> lambdas(cb.segments());
        for (double& l : lambdas)
            l = u01(rng);
        const VectorSet batch = random_vectors(4, 2, rng, -2.0, 2.0);
        const auto assigns = assign_dithered(batch, DitheredCodebook(cb, lambdas));
        for (const auto& a : assigns) {
            const auto seg =
                quantize_segment(std::span(batch.row(a.sample), 2), cb);
            CHECK(a.squared_error >= seg.squared_error - 1e-15);
        }
    }
}

TEST_CASE("training doubles the codebook every stage") {
    DistributionParams p;
    p.kind = DistributionKind::Gaussian;
    p.gaussian_dim = 2;
    const VectorSet data = generate(p, 2000, 9);
    TrainConfig cfg;
    cfg.target_bits = 4;
    cfg.batches_per_stage = 50;
    cfg.seed = 1;
    const TrainResult r = train(cfg, data);
    REQUIRE(r.history.size() == 3);
    CHECK(r.history[0].codewords == 4);
    CHECK(r.history[1].codewords == 8);
    CHECK(r.history[2].codewords == 16);
    CHECK(r.codebook.size() == 16);
    CHECK(r.codebook.bits() == 4);
}

TEST_CASE("training is bit-reproducible") {
    DistributionParams p;
    p.kind = DistributionKind::Gaussian;
    p.gaussian_dim = 2;
    const VectorSet data = generate(p, 1000, 2);
    TrainConfig cfg;
    cfg.target_bits = 3;
    cfg.batches_per_stage = 100;
    cfg.seed = 7;
    const TrainResult a = train(cfg, data);
    const TrainResult b = train(cfg, data);
    CHECK(a.codebook.data == b.codebook.data);

    cfg.mode = QuantizerMode::Vq;
    const TrainResult c = train(cfg, data);
    const TrainResult d = train(cfg, data);
    CHECK(c.codebook.data == d.codebook.data);
}

TEST_CASE("training reduces the loss on an easy target") {
    DistributionParams p;
    p.kind = DistributionKind::Gaussian;
    p.gaussian_dim = 2;
    const VectorSet data = generate(p, 5000, 4);
    TrainConfig cfg;
    cfg.target_bits = 4;
    cfg.batches_per_stage = 2000;
    cfg.seed = 1;
    const TrainResult r = train(cfg, data);
    CHECK(r.history.back().mean_loss < r.history.front().initial_loss);
}

TEST_CASE("norm-sorted initialization orders codeword norms") {
    // an off-center cloud, where norm order tracks position along the mean
    // direction; group means then inherit the ordering robustly
    DistributionParams p;
    p.kind = DistributionKind::Gaussian;
    p.gaussian_dim = 3;
    VectorSet data = generate(p, 3000, 6);
    for (std::size_t i = 0; i < data.count; ++i)
        for (int d = 0; d < 3; ++d)
            data.row(i)[d] += 2.0;
    const Codebook cb = init_norm_sorted(data, 4, 1000, 123);
    for (std::size_t i = 0; i + 1 < cb.size(); ++i)
        CHECK(norm(cb.word(i), 3) <= norm(cb.word(i + 1), 3));
}

TEST_CASE("train validates its inputs") {
    VectorSet empty(2, 0);
    TrainConfig cfg;
    CHECK_THROWS_AS(train(cfg, empty), InvalidArgument);

    DistributionParams p;
    p.kind = DistributionKind::Gaussian;
    const VectorSet data = generate(p, 100, 1);
    cfg.target_bits = 1;
    CHECK_THROWS_AS(train(cfg, data), InvalidArgument);
    cfg.target_bits = 13;
    CHECK_THROWS_AS(train(cfg, data), InvalidArgument);
    cfg.target_bits = 6;
    cfg.batch_size = 101; // more than the data has
    CHECK_THROWS_AS(train(cfg, data), InvalidArgument);
}

TEST_CASE("codebook bits are defined only for powers of two") {
    CHECK(Codebook(1, 8).bits() == 3);
    CHECK(Codebook(1, 64).bits() == 6);
    CHECK_FALSE(Codebook(1, 6).bits().has_value());
    CHECK_FALSE(Codebook(1, 1).bits().has_value());
}
