#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ovum/errors.hpp"
#include "ovum/synthetic.hpp"

#include <cmath>
#include <map>
#include <set>

using namespace ovum;

namespace {

double frame_mean(const Frame& frame) {
    double sum = 0.0;
    for (double v : frame.pixels.values()) sum += v;
    return sum / static_cast<double>(frame.pixels.size());
}

} // namespace

TEST_CASE("noise-free raters grade deterministically from viability") {
    Rng rng = make_rng(0);
    CHECK(sample_grades(1.0, 0.0, rng) == std::array<int, 5>{5, 5, 5, 5, 5});
    CHECK(sample_grades(0.0, 0.0, rng) == std::array<int, 5>{1, 1, 1, 1, 1});
    CHECK(sample_grades(0.5, 0.0, rng) == std::array<int, 5>{3, 3, 3, 3, 3});
    CHECK_THROWS_AS(sample_grades(1.5, 0.0, rng), ValueError);
}

TEST_CASE("mean panel grade is nondecreasing in viability buckets") {
    Rng rng = make_rng(1);
    std::array<double, 10> bucket_mean{};
    const std::size_t per_bucket = 100;
    for (std::size_t b = 0; b < 10; ++b) {
        double sum = 0.0;
        for (std::size_t i = 0; i < per_bucket; ++i) {
            const double v = (b + 0.5) / 10.0;
            for (int g : sample_grades(v, 0.5, rng)) sum += g;
        }
        bucket_mean[b] = sum / (per_bucket * 5.0);
    }
    for (std::size_t b = 1; b < 10; ++b) CHECK(bucket_mean[b] >= bucket_mean[b - 1]);
}

TEST_CASE("outcome calibration hits the target prevalence") {
    // slope equals signal strength
    CHECK(calibrate_outcome(10.0, 0.79).slope == 10.0);
    CHECK(calibrate_outcome(0.0, 0.79).slope == 0.0);

    Rng rng = make_rng(2);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    for (double signal : {0.0, 10.0}) {
        const OutcomeCalibration cal = calibrate_outcome(signal, 0.79);
        std::size_t positives = 0;
        const std::size_t draws = 10000;
        for (std::size_t i = 0; i < draws; ++i) {
            positives += sample_outcome(uniform(rng), cal, rng);
        }
        const double rate = static_cast<double>(positives) / draws;
        CHECK(rate == doctest::Approx(0.79).epsilon(0.026)); // within +/- 2%
    }
}

TEST_CASE("zero signal makes the label independent of viability") {
    const OutcomeCalibration cal = calibrate_outcome(0.0, 0.6);
    Rng rng = make_rng(3);
    std::size_t low_pos = 0, high_pos = 0;
    const std::size_t draws = 20000;
    for (std::size_t i = 0; i < draws; ++i) {
        low_pos += sample_outcome(0.05, cal, rng);
        high_pos += sample_outcome(0.95, cal, rng);
    }
    CHECK(static_cast<double>(low_pos) / draws ==
          doctest::Approx(static_cast<double>(high_pos) / draws).epsilon(0.03));
}

TEST_CASE("a huge slope at balanced prevalence becomes a step at v = 0.5") {
    const OutcomeCalibration cal = calibrate_outcome(1000.0, 0.5);
    Rng rng = make_rng(4);
    for (int i = 0; i < 50; ++i) {
        CHECK(sample_outcome(0.6, cal, rng) == 1);
        CHECK(sample_outcome(0.4, cal, rng) == 0);
    }
}

TEST_CASE("rendered pixels stay in [0,1] for extreme viabilities and frames") {
    SyntheticConfig cfg;
    Rng rng = make_rng(5);
    for (double v : {0.0, 0.5, 1.0}) {
        for (std::size_t t : {std::size_t{0}, cfg.frames_per_video - 1}) {
            Frame frame = render_frame(LatentViability{v}, t, cfg, rng);
            for (double p : frame.pixels.values()) {
                CHECK(p >= 0.0);
                CHECK(p <= 1.0);
            }
        }
    }
    CHECK_THROWS_AS(render_frame(LatentViability{0.5}, cfg.frames_per_video, cfg, rng),
                    ValueError);
}

TEST_CASE("high viability renders strictly brighter late frames than low viability") {
    SyntheticConfig cfg;
    Rng rng = make_rng(6);
    const std::size_t late = cfg.frames_per_video - 1;
    double mean_high = 0.0, mean_low = 0.0;
    for (int i = 0; i < 20; ++i) {
        mean_high += frame_mean(render_frame(LatentViability{1.0}, late, cfg, rng));
        mean_low += frame_mean(render_frame(LatentViability{0.0}, late, cfg, rng));
    }
    CHECK(mean_high / 20 > mean_low / 20);
}

TEST_CASE("zero signal strength erases viability from the frame statistics") {
    SyntheticConfig cfg;
    cfg.signal_strength = 0.0;
    Rng rng = make_rng(7);
    const std::size_t late = cfg.frames_per_video - 1;
    const std::size_t n = 100;

    // two-sample t-statistic on the per-frame means
    std::vector<double> high, low;
    for (std::size_t i = 0; i < n; ++i) {
        high.push_back(frame_mean(render_frame(LatentViability{1.0}, late, cfg, rng)));
        low.push_back(frame_mean(render_frame(LatentViability{0.0}, late, cfg, rng)));
    }
    double mh = 0, ml = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mh += high[i];
        ml += low[i];
    }
    mh /= n;
    ml /= n;
    double vh = 0, vl = 0;
    for (std::size_t i = 0; i < n; ++i) {
        vh += (high[i] - mh) * (high[i] - mh);
        vl += (low[i] - ml) * (low[i] - ml);
    }
    vh /= (n - 1);
    vl /= (n - 1);
    const double t_stat = (mh - ml) / std::sqrt(vh / n + vl / n);
    CHECK(std::abs(t_stat) < 4.0);
}

TEST_CASE("generate_dataset is deterministic and structured") {
    SyntheticConfig cfg;
    cfg.n_unlabeled = 20;
    cfg.n_graded = 15;
    cfg.n_kid = 25;
    cfg.frames_per_video = 3;
    cfg.frame_size = 12;
    cfg.seed = 77;

    Dataset a = generate_dataset(cfg);
    Dataset b = generate_dataset(cfg);

    CHECK(a.unlabeled.size() == 20);
    CHECK(a.graded.size() == 15);
    CHECK(a.kid.size() == 25);

    const auto all_equal = [](const std::vector<EmbryoRecord>& x,
                              const std::vector<EmbryoRecord>& y) {
        REQUIRE(x.size() == y.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            CHECK(x[i].embryo_id == y[i].embryo_id);
            CHECK(x[i].patient_id == y[i].patient_id);
            CHECK(x[i].grades == y[i].grades);
            CHECK(x[i].kid_label == y[i].kid_label);
            REQUIRE(x[i].frames.size() == y[i].frames.size());
            for (std::size_t f = 0; f < x[i].frames.size(); ++f) {
                CHECK(x[i].frames[f].pixels == y[i].frames[f].pixels);
            }
        }
    };
    all_equal(a.unlabeled, b.unlabeled);
    all_equal(a.graded, b.graded);
    all_equal(a.kid, b.kid);

    // record contract: ids unique, annotations match subsets
    std::set<std::string> ids;
    std::map<std::string, std::size_t> embryos_per_patient;
    const auto scan = [&](const std::vector<EmbryoRecord>& records) {
        for (const EmbryoRecord& r : records) {
            CHECK(ids.insert(r.embryo_id).second);
            embryos_per_patient[r.patient_id]++;
            validate_record(r);
        }
    };
    scan(a.unlabeled);
    scan(a.graded);
    scan(a.kid);
    for (const auto& [_, count] : embryos_per_patient) {
        CHECK(count >= 1);
        CHECK(count <= 3);
    }

    for (const EmbryoRecord& r : a.graded) CHECK(r.grades.has_value());
    for (const EmbryoRecord& r : a.kid) {
        CHECK(r.grades.has_value());
        CHECK(r.kid_label.has_value());
    }
}

TEST_CASE("kid prevalence lands within 3% of target for 1000 records") {
    SyntheticConfig cfg;
    cfg.n_unlabeled = 0;
    cfg.n_graded = 0;
    cfg.n_kid = 1000;
    cfg.frames_per_video = 1;
    cfg.frame_size = 8;
    cfg.seed = 5;

    Dataset dataset = generate_dataset(cfg);
    std::size_t positives = 0;
    for (const EmbryoRecord& r : dataset.kid) positives += *r.kid_label;
    CHECK(static_cast<double>(positives) / 1000.0 ==
          doctest::Approx(0.79).epsilon(0.038)); // +/- 3%
}

TEST_CASE("expected positive count for the 272-video configuration is about 216") {
    SyntheticConfig cfg;
    cfg.n_unlabeled = 0;
    cfg.n_graded = 0;
    cfg.n_kid = 272;
    cfg.frames_per_video = 1;
    cfg.frame_size = 8;
    cfg.seed = 9;
    Dataset dataset = generate_dataset(cfg);
    std::size_t positives = 0;
    for (const EmbryoRecord& r : dataset.kid) positives += *r.kid_label;
    CHECK(positives > 190);
    CHECK(positives < 240); // ~216 expected, binomial spread
}

TEST_CASE("invalid configurations are rejected") {
    SyntheticConfig cfg;
    cfg.target_prevalence = 1.0;
    CHECK_THROWS_AS(validate_config(cfg), ConfigError);
    cfg = SyntheticConfig{};
    cfg.frames_per_video = 0;
    CHECK_THROWS_AS(validate_config(cfg), ConfigError);
    cfg = SyntheticConfig{};
    cfg.signal_strength = -1.0;
    CHECK_THROWS_AS(validate_config(cfg), ConfigError);
}
