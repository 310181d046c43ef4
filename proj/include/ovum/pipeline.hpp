#pragma once

#include "ovum/autoencoder.hpp"
#include "ovum/dataset.hpp"
#include "ovum/io/config.hpp"
#include "ovum/io/report.hpp"

#include <cstdint>

namespace ovum {

/// Runs the whole protocol on an in-memory dataset: pretrains the autoencoder
/// on the unlabeled pool (once, outside CV), embeds every graded/KID video,
/// builds patient-grouped folds over graded+KID records, trains a grade model
/// and transfers a binary head per fold, scores each KID record out-of-fold,
/// and evaluates pooled predictions against the panel and the prevalence
/// baseline. Pure function of (dataset, config, seed).
///
/// A pretrained autoencoder can be supplied to skip the pretraining stage.
io::EvaluationReport run_experiment(const Dataset& dataset, const io::ExperimentConfig& cfg,
                                    std::uint64_t seed,
                                    const Autoencoder* pretrained = nullptr);

/// The autoencoder's training pool: every frame of every unlabeled video,
/// deterministically subsampled to cfg.ae_frame_limit when that is exceeded.
std::vector<Frame> collect_pretraining_frames(const Dataset& dataset,
                                              const io::ExperimentConfig& cfg,
                                              std::uint64_t seed);

} // namespace ovum
