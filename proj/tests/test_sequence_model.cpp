#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ovum/errors.hpp"
#include "ovum/sequence_model.hpp"
#include "test_support.hpp"

#include <cmath>

using namespace ovum;
using ovum::test::random_tensor;

namespace {

std::vector<FrameEmbedding> random_video(std::size_t steps, std::size_t dim, Rng& rng) {
    std::vector<FrameEmbedding> video;
    for (std::size_t t = 0; t < steps; ++t) video.push_back({random_tensor({dim}, rng)});
    return video;
}

/// Graded videos whose target distribution leans toward high grades when the
/// embeddings' mean is high: a learnable toy signal.
std::vector<GradedVideo> toy_graded_set(std::size_t count, std::size_t dim, Rng& rng) {
    std::vector<GradedVideo> data;
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    for (std::size_t i = 0; i < count; ++i) {
        const double v = uniform(rng);
        GradedVideo video;
        video.embeddings = random_video(6, dim, rng);
        for (FrameEmbedding& e : video.embeddings) {
            for (double& x : e.vec.values()) x += 2.0 * v - 1.0;
        }
        std::array<int, 5> grades{};
        for (int& g : grades) {
            g = static_cast<int>(std::clamp(std::lround(1.0 + 4.0 * v), 1L, 5L));
        }
        video.target = panel_to_distribution(grades);
        data.push_back(std::move(video));
    }
    return data;
}

std::vector<LabeledVideo> toy_labeled_set(std::size_t count, std::size_t dim, Rng& rng) {
    std::vector<LabeledVideo> data;
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    for (std::size_t i = 0; i < count; ++i) {
        const double v = uniform(rng);
        LabeledVideo video;
        video.embeddings = random_video(6, dim, rng);
        for (FrameEmbedding& e : video.embeddings) {
            for (double& x : e.vec.values()) x += 2.0 * v - 1.0;
        }
        video.label = v > 0.5 ? 1 : 0;
        data.push_back(std::move(video));
    }
    return data;
}

void zero_head(SequenceModel& model) {
    for (const std::string& name : model.head_params.names()) {
        model.head_params.mutable_value(name) =
            Tensor(model.head_params.value(name).shape());
    }
}

} // namespace

TEST_CASE("panel votes become an empirical histogram") {
    GradeDistribution unanimous = panel_to_distribution({3, 3, 3, 3, 3});
    CHECK(unanimous.probs == std::array<double, 5>{0, 0, 1, 0, 0});

    GradeDistribution spread = panel_to_distribution({1, 2, 3, 4, 5});
    for (double p : spread.probs) CHECK(p == doctest::Approx(0.2).epsilon(1e-15));

    GradeDistribution mixed = panel_to_distribution({4, 4, 5, 3, 4});
    CHECK(mixed.probs[2] == doctest::Approx(0.2));
    CHECK(mixed.probs[3] == doctest::Approx(0.6));
    CHECK(mixed.probs[4] == doctest::Approx(0.2));

    CHECK_THROWS_AS(panel_to_distribution({0, 3, 3, 3, 3}), ValueError);
    CHECK_THROWS_AS(panel_to_distribution({3, 3, 3, 3, 6}), ValueError);
}

TEST_CASE("zero grade head predicts the uniform distribution") {
    SequenceModel model = make_sequence_model(8, 16, HeadKind::Grade, 1);
    zero_head(model);
    Rng rng = make_rng(2);
    GradeDistribution dist = predict_grades(model, random_video(5, 8, rng));
    for (double p : dist.probs) CHECK(p == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("grade predictions always sum to 1") {
    SequenceModel model = make_sequence_model(8, 16, HeadKind::Grade, 3);
    Rng rng = make_rng(4);
    for (int trial = 0; trial < 20; ++trial) {
        GradeDistribution dist = predict_grades(model, random_video(4, 8, rng));
        double sum = 0.0;
        for (double p : dist.probs) {
            CHECK(p >= 0.0);
            sum += p;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("frame order matters to the recurrence") {
    SequenceModel model = make_sequence_model(8, 16, HeadKind::Grade, 5);
    Rng rng = make_rng(6);
    bool any_difference = false;
    for (int trial = 0; trial < 10 && !any_difference; ++trial) {
        std::vector<FrameEmbedding> video = random_video(4, 8, rng);
        std::vector<FrameEmbedding> swapped = video;
        std::swap(swapped.front(), swapped.back());
        GradeDistribution a = predict_grades(model, video);
        GradeDistribution b = predict_grades(model, swapped);
        for (std::size_t i = 0; i < 5; ++i) {
            if (std::abs(a.probs[i] - b.probs[i]) > 1e-9) any_difference = true;
        }
    }
    CHECK(any_difference);
}

TEST_CASE("wrong head is rejected on both prediction paths") {
    SequenceModel grade = make_sequence_model(8, 16, HeadKind::Grade, 7);
    SequenceModel binary = make_sequence_model(8, 16, HeadKind::Binary, 7);
    Rng rng = make_rng(8);
    std::vector<FrameEmbedding> video = random_video(3, 8, rng);
    CHECK_THROWS_AS(predict_grades(binary, video), HeadError);
    CHECK_THROWS_AS(predict_implantation(grade, video), HeadError);
}

TEST_CASE("grade training reduces the cross-entropy") {
    Rng rng = make_rng(9);
    std::vector<GradedVideo> data = toy_graded_set(60, 8, rng);
    SeqTrainConfig cfg;
    cfg.epochs = 8;
    cfg.hidden_dim = 16;
    cfg.seed = 9;
    SeqTrainResult result = train_grade_model(data, cfg);
    REQUIRE(result.loss_history.size() == 8);
    CHECK(result.loss_history.back() < result.loss_history.front());
}

TEST_CASE("identical one-hot targets drive the model to a constant predictor") {
    Rng rng = make_rng(10);
    std::vector<GradedVideo> data;
    for (int i = 0; i < 40; ++i) {
        GradedVideo video;
        video.embeddings = random_video(4, 8, rng);
        video.target = panel_to_distribution({4, 4, 4, 4, 4});
        data.push_back(std::move(video));
    }
    SeqTrainConfig cfg;
    cfg.epochs = 40;
    cfg.lr = 0.02;
    cfg.hidden_dim = 16;
    cfg.seed = 10;
    SeqTrainResult result = train_grade_model(data, cfg);
    CHECK(result.loss_history.back() < 0.1);
}

TEST_CASE("grade training is deterministic in the seed") {
    Rng rng = make_rng(11);
    std::vector<GradedVideo> data = toy_graded_set(20, 8, rng);
    SeqTrainConfig cfg;
    cfg.epochs = 3;
    cfg.hidden_dim = 16;
    cfg.seed = 123;
    SeqTrainResult a = train_grade_model(data, cfg);
    SeqTrainResult b = train_grade_model(data, cfg);
    CHECK(a.model.trunk.values_equal(b.model.trunk));
    CHECK(a.model.head_params.values_equal(b.model.head_params));
    CHECK(a.loss_history == b.loss_history);
}

TEST_CASE("empty training sets are rejected") {
    SeqTrainConfig cfg;
    CHECK_THROWS_AS(train_grade_model({}, cfg), ValueError);
}

TEST_CASE("head-only transfer keeps the trunk bit-identical") {
    Rng rng = make_rng(12);
    std::vector<GradedVideo> graded = toy_graded_set(20, 8, rng);
    SeqTrainConfig cfg;
    cfg.epochs = 3;
    cfg.hidden_dim = 16;
    cfg.seed = 12;
    SequenceModel grade_model = train_grade_model(graded, cfg).model;

    std::vector<LabeledVideo> labeled = toy_labeled_set(30, 8, rng);
    SeqTrainResult frozen =
        transfer_binary_head(grade_model, labeled, TransferPolicy::HeadOnly, cfg);
    CHECK(frozen.model.head == HeadKind::Binary);
    CHECK(frozen.model.trunk.values_equal(grade_model.trunk));

    SeqTrainResult tuned =
        transfer_binary_head(grade_model, labeled, TransferPolicy::FullFinetune, cfg);
    CHECK_FALSE(tuned.model.trunk.values_equal(grade_model.trunk));
}

TEST_CASE("transfer training reduces the weighted BCE and is deterministic") {
    Rng rng = make_rng(13);
    std::vector<GradedVideo> graded = toy_graded_set(20, 8, rng);
    SeqTrainConfig cfg;
    cfg.epochs = 8;
    cfg.hidden_dim = 16;
    cfg.seed = 13;
    SequenceModel grade_model = train_grade_model(graded, cfg).model;

    std::vector<LabeledVideo> labeled = toy_labeled_set(40, 8, rng);
    SeqTrainResult a =
        transfer_binary_head(grade_model, labeled, TransferPolicy::FullFinetune, cfg);
    CHECK(a.loss_history.back() < a.loss_history.front());

    SeqTrainResult b =
        transfer_binary_head(grade_model, labeled, TransferPolicy::FullFinetune, cfg);
    CHECK(a.model.trunk.values_equal(b.model.trunk));
    CHECK(a.model.head_params.values_equal(b.model.head_params));
}

TEST_CASE("single-class transfer data is rejected") {
    Rng rng = make_rng(14);
    SequenceModel grade_model = make_sequence_model(8, 16, HeadKind::Grade, 14);
    std::vector<LabeledVideo> all_positive;
    for (int i = 0; i < 5; ++i) all_positive.push_back({random_video(3, 8, rng), 1});
    SeqTrainConfig cfg;
    CHECK_THROWS_WITH_AS(
        transfer_binary_head(grade_model, all_positive, TransferPolicy::HeadOnly, cfg),
        doctest::Contains("single-class"), ValueError);
}

TEST_CASE("zero binary head predicts exactly 0.5 and bias raises it strictly") {
    SequenceModel model = make_sequence_model(8, 16, HeadKind::Binary, 15);
    zero_head(model);
    Rng rng = make_rng(16);
    std::vector<FrameEmbedding> video = random_video(4, 8, rng);
    CHECK(predict_implantation(model, video).probability == 0.5);

    double previous = 0.5;
    for (double bias : {0.5, 1.0, 2.0}) {
        model.head_params.mutable_value("head_b") = Tensor({1}, {bias});
        const double p = predict_implantation(model, video).probability;
        CHECK(p > previous);
        CHECK(p >= 0.0);
        CHECK(p <= 1.0);
        previous = p;
    }
}

TEST_CASE("predictions stay in [0,1] over random inputs") {
    SequenceModel model = make_sequence_model(8, 16, HeadKind::Binary, 17);
    Rng rng = make_rng(18);
    for (int trial = 0; trial < 20; ++trial) {
        const double p = predict_implantation(model, random_video(4, 8, rng)).probability;
        CHECK(p >= 0.0);
        CHECK(p <= 1.0);
    }
}

TEST_CASE("trunk gradients are nonzero for generic inputs") {
    SequenceModel model = make_sequence_model(8, 16, HeadKind::Binary, 19);
    Rng rng = make_rng(20);
    LabeledVideo video{random_video(4, 8, rng), 1};
    BinaryGrads grads = binary_backward(model, video, 1.0);
    double magnitude = 0.0;
    for (const auto& [name, g] : grads.trunk) {
        for (double v : g.values()) magnitude += std::abs(v);
    }
    CHECK(magnitude > 0.0);
}
