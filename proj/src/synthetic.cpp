#include "ovum/synthetic.hpp"

#include "ovum/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace ovum {

namespace {

double softplus(double z) {
    return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
}

double logistic(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

/// Mean of sigmoid(a*(v-0.5)+b) over v ~ Uniform(0,1), in closed form.
double mean_positive_rate(double a, double b) {
    if (a == 0.0) return logistic(b);
    return (softplus(0.5 * a + b) - softplus(-0.5 * a + b)) / a;
}

std::string format_id(const char* prefix, std::size_t n) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%s%05zu", prefix, n);
    return std::string(buf);
}

} // namespace

void validate_config(const SyntheticConfig& cfg) {
    if (cfg.frames_per_video == 0) throw ConfigError("frames_per_video must be >= 1");
    if (cfg.frame_size < 8) throw ConfigError("frame_size must be >= 8");
    if (!(cfg.target_prevalence > 0.0 && cfg.target_prevalence < 1.0)) {
        throw ConfigError("target_prevalence must lie in (0,1)");
    }
    if (cfg.signal_strength < 0.0) throw ConfigError("signal_strength must be >= 0");
    if (cfg.rater_noise_std < 0.0) throw ConfigError("rater_noise_std must be >= 0");
}

OutcomeCalibration calibrate_outcome(double signal_strength, double target_prevalence) {
    if (!(target_prevalence > 0.0 && target_prevalence < 1.0)) {
        throw ConfigError("target_prevalence must lie in (0,1)");
    }
    if (signal_strength < 0.0) throw ConfigError("signal_strength must be >= 0");

    OutcomeCalibration cal;
    cal.slope = signal_strength;
    if (signal_strength == 0.0) {
        cal.intercept = std::log(target_prevalence / (1.0 - target_prevalence));
        return cal;
    }
    // mean_positive_rate is strictly increasing in b; bisect
    double lo = -60.0, hi = 60.0;
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mean_positive_rate(cal.slope, mid) < target_prevalence) lo = mid;
        else hi = mid;
    }
    cal.intercept = 0.5 * (lo + hi);
    return cal;
}

Frame render_frame(LatentViability v, std::size_t t, const SyntheticConfig& cfg, Rng& rng) {
    if (!(v.v >= 0.0 && v.v <= 1.0)) {
        throw ValueError("latent viability " + std::to_string(v.v) + " outside [0,1]");
    }
    if (t >= cfg.frames_per_video) {
        throw ValueError("frame index " + std::to_string(t) + " >= frames_per_video " +
                         std::to_string(cfg.frames_per_video));
    }

    // mixing weight: at 0 the frame carries no viability signal at all
    const double w = std::min(1.0, cfg.signal_strength);
    const double vis = std::clamp(0.5 + w * (v.v - 0.5), 0.0, 1.0);

    const std::size_t s = cfg.frame_size;
    const double center = 0.5 * static_cast<double>(s - 1);
    const double progress = cfg.frames_per_video > 1
                                ? static_cast<double>(t) /
                                      static_cast<double>(cfg.frames_per_video - 1)
                                : 0.0;
    const double radius = 0.10 * s + 0.30 * s * vis * progress;
    const double speckle_amp = 0.35 * (1.0 - vis);

    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    std::normal_distribution<double> pixel_noise(0.0, 0.02);

    Tensor pixels({1, s, s});
    double* px = pixels.data();
    for (std::size_t y = 0; y < s; ++y) {
        for (std::size_t x = 0; x < s; ++x) {
            const double dy = static_cast<double>(y) - center;
            const double dx = static_cast<double>(x) - center;
            const double d = std::sqrt(dx * dx + dy * dy);
            const double cover = std::clamp(radius + 0.5 - d, 0.0, 1.0); // soft edge
            double value = 0.08 + 0.74 * cover;
            // constant rng consumption: speckle drawn for every pixel
            const double speckle = (2.0 * uniform(rng) - 1.0) * speckle_amp;
            if (d < radius) value += speckle;
            value += pixel_noise(rng);
            px[y * s + x] = std::clamp(value, 0.0, 1.0);
        }
    }
    return make_frame(std::move(pixels));
}

std::array<int, 5> sample_grades(double v, double rater_noise_std, Rng& rng) {
    if (!(v >= 0.0 && v <= 1.0)) {
        throw ValueError("latent viability " + std::to_string(v) + " outside [0,1]");
    }
    std::normal_distribution<double> noise(0.0, rater_noise_std > 0.0 ? rater_noise_std : 1.0);
    std::array<int, 5> grades{};
    for (int& g : grades) {
        const double eps = rater_noise_std > 0.0 ? noise(rng) : 0.0;
        const long raw = std::lround(1.0 + 4.0 * v + eps);
        g = static_cast<int>(std::clamp(raw, 1L, 5L));
    }
    return grades;
}

int sample_outcome(double v, const OutcomeCalibration& cal, Rng& rng) {
    if (!(v >= 0.0 && v <= 1.0)) {
        throw ValueError("latent viability " + std::to_string(v) + " outside [0,1]");
    }
    const double p = logistic(cal.slope * (v - 0.5) + cal.intercept);
    std::bernoulli_distribution draw(p);
    return draw(rng) ? 1 : 0;
}

Dataset generate_dataset(const SyntheticConfig& cfg) {
    validate_config(cfg);
    const OutcomeCalibration cal =
        calibrate_outcome(cfg.signal_strength, cfg.target_prevalence);

    const std::size_t total = cfg.n_unlabeled + cfg.n_graded + cfg.n_kid;

    // one continuous patient stream across all three subsets
    Rng patient_rng = make_rng(cfg.seed, 0x706174u /* "pat" */);
    std::uniform_int_distribution<std::size_t> embryos_per_patient(1, 3);

    Dataset dataset;
    dataset.frame_size = cfg.frame_size;
    dataset.frames_per_video = cfg.frames_per_video;

    std::size_t patient_count = 0;
    std::size_t remaining_in_patient = 0;
    std::string patient_id;

    for (std::size_t i = 0; i < total; ++i) {
        if (remaining_in_patient == 0) {
            patient_id = format_id("p", patient_count++);
            remaining_in_patient = embryos_per_patient(patient_rng);
        }
        --remaining_in_patient;

        EmbryoRecord record;
        record.embryo_id = format_id("e", i);
        record.patient_id = patient_id;
        record.subset = i < cfg.n_unlabeled ? Subset::Unlabeled
                        : i < cfg.n_unlabeled + cfg.n_graded ? Subset::Graded
                                                             : Subset::Kid;

        Rng rng = make_rng(cfg.seed, 0x1000 + i);
        std::uniform_real_distribution<double> uniform(0.0, 1.0);
        const LatentViability v{uniform(rng)};

        record.frames.reserve(cfg.frames_per_video);
        for (std::size_t t = 0; t < cfg.frames_per_video; ++t) {
            record.frames.push_back(render_frame(v, t, cfg, rng));
        }
        if (record.subset != Subset::Unlabeled) {
            record.grades = sample_grades(v.v, cfg.rater_noise_std, rng);
        }
        if (record.subset == Subset::Kid) {
            record.kid_label = sample_outcome(v.v, cal, rng);
        }
        validate_record(record);

        switch (record.subset) {
            case Subset::Unlabeled: dataset.unlabeled.push_back(std::move(record)); break;
            case Subset::Graded: dataset.graded.push_back(std::move(record)); break;
            case Subset::Kid: dataset.kid.push_back(std::move(record)); break;
        }
    }
    return dataset;
}

} // namespace ovum
