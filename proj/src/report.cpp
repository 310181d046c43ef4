#include "ovum/io/report.hpp"

#include "ovum/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace ovum::io {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr std::uint32_t kReportVersion = 1;

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return nlohmann::json(v).dump(); // shortest round-trip decimal
}

/// Thresholds can be +/-inf (the ROC endpoints); JSON numbers cannot.
ordered_json number_or_tag(double v) {
    if (std::isnan(v)) return nullptr;
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

double tag_or_number(const ordered_json& j) {
    if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        throw IoError("report: bad numeric tag '" + s + "'");
    }
    return j.get<double>();
}

ordered_json optional_to_json(const std::optional<double>& v) {
    if (!v) return nullptr;
    return *v;
}

std::optional<double> optional_from_json(const ordered_json& j) {
    if (j.is_null()) return std::nullopt;
    return j.get<double>();
}

ordered_json roc_to_json(const RocCurve& curve) {
    ordered_json arr = ordered_json::array();
    for (const RocPoint& p : curve.points) {
        arr.push_back(ordered_json::array({number_or_tag(p.threshold), p.fpr, p.tpr}));
    }
    return arr;
}

RocCurve roc_from_json(const ordered_json& arr) {
    RocCurve curve;
    for (const auto& row : arr) {
        curve.points.push_back({tag_or_number(row.at(0)), row.at(1).get<double>(),
                                row.at(2).get<double>()});
    }
    return curve;
}

ordered_json pv_to_json(const PredictiveValues& pv) {
    ordered_json j;
    j["threshold"] = number_or_tag(pv.threshold);
    j["tp"] = pv.tp;
    j["fp"] = pv.fp;
    j["tn"] = pv.tn;
    j["fn"] = pv.fn;
    j["ppv"] = optional_to_json(pv.ppv);
    j["npv"] = optional_to_json(pv.npv);
    return j;
}

PredictiveValues pv_from_json(const ordered_json& j) {
    PredictiveValues pv;
    pv.threshold = tag_or_number(j.at("threshold"));
    pv.tp = j.at("tp").get<double>();
    pv.fp = j.at("fp").get<double>();
    pv.tn = j.at("tn").get<double>();
    pv.fn = j.at("fn").get<double>();
    pv.ppv = optional_from_json(j.at("ppv"));
    pv.npv = optional_from_json(j.at("npv"));
    return pv;
}

ordered_json method_to_json(const MethodEvaluation& m) {
    ordered_json j;
    j["roc"] = roc_to_json(m.roc);
    j["auc"] = m.auc_value;
    j["auc_bootstrap"] = {{"mean", m.bootstrap.mean},
                          {"std", m.bootstrap.std},
                          {"repetitions", m.bootstrap.repetitions},
                          {"seed", m.bootstrap.seed}};
    j["fixed_threshold"] = m.fixed_threshold;
    j["predictive_values_fixed"] = pv_to_json(m.pv_fixed);
    j["youden_threshold"] = number_or_tag(m.youden);
    j["predictive_values_youden"] = pv_to_json(m.pv_youden);
    return j;
}

MethodEvaluation method_from_json(const ordered_json& j) {
    MethodEvaluation m;
    m.roc = roc_from_json(j.at("roc"));
    m.auc_value = j.at("auc").get<double>();
    const auto& b = j.at("auc_bootstrap");
    m.bootstrap.mean = b.at("mean").get<double>();
    m.bootstrap.std = b.at("std").get<double>();
    m.bootstrap.repetitions = b.at("repetitions").get<std::size_t>();
    m.bootstrap.seed = b.at("seed").get<std::uint64_t>();
    m.fixed_threshold = j.at("fixed_threshold").get<double>();
    m.pv_fixed = pv_from_json(j.at("predictive_values_fixed"));
    m.youden = tag_or_number(j.at("youden_threshold"));
    m.pv_youden = pv_from_json(j.at("predictive_values_youden"));
    return m;
}

} // namespace

std::map<std::string, std::string> reference_annotations() {
    return {
        {"note", "Published values from the original clinical study, shown for context "
                 "(reference, not reproduced). This synthetic benchmark cannot reproduce "
                 "them: the clinical dataset is private."},
        {"model_auc", "0.82 +/- 0.07"},
        {"panel_auc", "0.58 +/- 0.04"},
        {"model_ppv", "93%"},
        {"panel_ppv", "81 +/- 1%"},
        {"model_npv", "58%"},
        {"panel_npv", "23 +/- 8%"},
    };
}

std::string report_to_json(const EvaluationReport& report) {
    ordered_json j;
    j["format"] = "ovum-report";
    j["format_version"] = kReportVersion;
    j["dataset_dir"] = report.dataset_dir;
    j["seed"] = report.seed;
    j["config"] = report.config; // std::map: keys already sorted
    j["config_fingerprint"] = report.config_fingerprint;

    j["dataset"] = {{"n_unlabeled", report.n_unlabeled},
                    {"n_graded", report.n_graded},
                    {"n_kid", report.n_kid},
                    {"kid_positives", report.kid_positives},
                    {"kid_negatives", report.kid_negatives}};

    j["autoencoder"] = {{"loss_history", report.ae_loss_history}};

    ordered_json folds = ordered_json::array();
    for (const FoldReport& f : report.folds) {
        ordered_json fj;
        fj["fold"] = f.fold;
        fj["n_train_graded"] = f.n_train_graded;
        fj["n_train_kid"] = f.n_train_kid;
        fj["n_val_kid"] = f.n_val_kid;
        fj["grade_loss_initial"] = f.grade_loss_initial;
        fj["grade_loss_final"] = f.grade_loss_final;
        fj["binary_loss_initial"] = f.binary_loss_initial;
        fj["binary_loss_final"] = f.binary_loss_final;
        fj["val_auc"] = optional_to_json(f.val_auc);
        folds.push_back(std::move(fj));
    }
    j["folds"] = std::move(folds);
    j["fold_mean_auc"] = optional_to_json(report.fold_mean_auc);

    j["model"] = method_to_json(report.model);

    ordered_json panel;
    panel["mean_score"] = method_to_json(report.panel.mean_score);
    panel["per_grader_auc"] = report.panel.per_grader_auc;
    panel["per_grader_mean"] = report.panel.per_grader_mean;
    panel["per_grader_std"] = report.panel.per_grader_std;
    j["panel"] = std::move(panel);

    ordered_json baseline;
    baseline["ppv"] = optional_to_json(report.baseline.ppv);
    baseline["npv"] = optional_to_json(report.baseline.npv);
    baseline["expected_confusion"] = {{"tp", report.baseline.tp},
                                      {"fp", report.baseline.fp},
                                      {"tn", report.baseline.tn},
                                      {"fn", report.baseline.fn}};
    j["random_baseline"] = std::move(baseline);

    j["reference_values"] = reference_annotations();

    ordered_json preds = ordered_json::array();
    for (const PredictionRow& row : report.predictions) {
        preds.push_back({{"embryo_id", row.embryo_id},
                         {"fold", row.fold},
                         {"score", row.score},
                         {"panel_mean", row.panel_mean},
                         {"label", row.label}});
    }
    j["predictions"] = std::move(preds);

    return j.dump(2) + "\n";
}

EvaluationReport report_from_json(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("report: cannot parse JSON: ") + e.what());
    }
    if (j.value("format", "") != "ovum-report") {
        throw IoError("report: not an ovum-report document");
    }
    if (j.at("format_version").get<std::uint32_t>() != kReportVersion) {
        throw IoError("report: unsupported format_version");
    }

    EvaluationReport report;
    report.dataset_dir = j.at("dataset_dir").get<std::string>();
    report.seed = j.at("seed").get<std::uint64_t>();
    report.config = j.at("config").get<std::map<std::string, std::string>>();
    report.config_fingerprint = j.at("config_fingerprint").get<std::string>();

    const auto& d = j.at("dataset");
    report.n_unlabeled = d.at("n_unlabeled").get<std::size_t>();
    report.n_graded = d.at("n_graded").get<std::size_t>();
    report.n_kid = d.at("n_kid").get<std::size_t>();
    report.kid_positives = d.at("kid_positives").get<std::size_t>();
    report.kid_negatives = d.at("kid_negatives").get<std::size_t>();

    report.ae_loss_history =
        j.at("autoencoder").at("loss_history").get<std::vector<double>>();

    for (const auto& fj : j.at("folds")) {
        FoldReport f;
        f.fold = fj.at("fold").get<std::size_t>();
        f.n_train_graded = fj.at("n_train_graded").get<std::size_t>();
        f.n_train_kid = fj.at("n_train_kid").get<std::size_t>();
        f.n_val_kid = fj.at("n_val_kid").get<std::size_t>();
        f.grade_loss_initial = fj.at("grade_loss_initial").get<double>();
        f.grade_loss_final = fj.at("grade_loss_final").get<double>();
        f.binary_loss_initial = fj.at("binary_loss_initial").get<double>();
        f.binary_loss_final = fj.at("binary_loss_final").get<double>();
        f.val_auc = optional_from_json(fj.at("val_auc"));
        report.folds.push_back(std::move(f));
    }
    report.fold_mean_auc = optional_from_json(j.at("fold_mean_auc"));

    report.model = method_from_json(j.at("model"));

    const auto& panel = j.at("panel");
    report.panel.mean_score = method_from_json(panel.at("mean_score"));
    report.panel.per_grader_auc = panel.at("per_grader_auc").get<std::array<double, 5>>();
    report.panel.per_grader_mean = panel.at("per_grader_mean").get<double>();
    report.panel.per_grader_std = panel.at("per_grader_std").get<double>();

    const auto& baseline = j.at("random_baseline");
    report.baseline.ppv = optional_from_json(baseline.at("ppv"));
    report.baseline.npv = optional_from_json(baseline.at("npv"));
    report.baseline.threshold = std::numeric_limits<double>::quiet_NaN();
    const auto& conf = baseline.at("expected_confusion");
    report.baseline.tp = conf.at("tp").get<double>();
    report.baseline.fp = conf.at("fp").get<double>();
    report.baseline.tn = conf.at("tn").get<double>();
    report.baseline.fn = conf.at("fn").get<double>();

    for (const auto& pj : j.at("predictions")) {
        PredictionRow row;
        row.embryo_id = pj.at("embryo_id").get<std::string>();
        row.fold = pj.at("fold").get<std::size_t>();
        row.score = pj.at("score").get<double>();
        row.panel_mean = pj.at("panel_mean").get<double>();
        row.label = pj.at("label").get<int>();
        report.predictions.push_back(std::move(row));
    }
    return report;
}

void save_report(const EvaluationReport& report, const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write report " + path.string());
    out << report_to_json(report);
    if (!out) throw IoError("short write to report " + path.string());
}

EvaluationReport load_report(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open report " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return report_from_json(buf.str());
}

namespace {

void write_text_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << content;
    if (!out) throw IoError("short write to " + path.string());
}

std::string roc_csv(const RocCurve& curve) {
    std::string csv = "threshold,fpr,tpr\n";
    for (const RocPoint& p : curve.points) {
        csv += format_double(p.threshold) + "," + format_double(p.fpr) + "," +
               format_double(p.tpr) + "\n";
    }
    return csv;
}

std::string predictions_csv(const EvaluationReport& report) {
    std::string csv = "embryo_id,fold,model_score,panel_mean,label\n";
    for (const PredictionRow& row : report.predictions) {
        csv += row.embryo_id + "," + std::to_string(row.fold) + "," +
               format_double(row.score) + "," + format_double(row.panel_mean) + "," +
               std::to_string(row.label) + "\n";
    }
    return csv;
}

std::string format_percent(const std::optional<double>& v) {
    if (!v) return "n/a";
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%.0f%%", *v * 100.0);
    return buf;
}

void svg_polyline(std::string& svg, const RocCurve& curve, double x0, double y0,
                  double size, const char* color) {
    svg += "  <polyline fill=\"none\" stroke=\"";
    svg += color;
    svg += "\" stroke-width=\"2\" points=\"";
    for (const RocPoint& p : curve.points) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", x0 + p.fpr * size,
                      y0 + size - p.tpr * size);
        svg += buf;
    }
    svg += "\"/>\n";
}

std::string figure_svg(const EvaluationReport& report) {
    const double ax = 70, ay = 50, plot = 300; // ROC box
    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"900\" height=\"430\" "
           "font-family=\"sans-serif\" font-size=\"13\">\n";
    svg += "  <rect width=\"900\" height=\"430\" fill=\"white\"/>\n";

    // --- panel A: ROC curves ---
    char buf[256];
    svg += "  <text x=\"70\" y=\"30\" font-size=\"15\" font-weight=\"bold\">A. ROC: model "
           "vs panel</text>\n";
    std::snprintf(buf, sizeof(buf),
                  "  <rect x=\"%.0f\" y=\"%.0f\" width=\"%.0f\" height=\"%.0f\" "
                  "fill=\"none\" stroke=\"black\"/>\n",
                  ax, ay, plot, plot);
    svg += buf;
    std::snprintf(buf, sizeof(buf),
                  "  <line x1=\"%.0f\" y1=\"%.0f\" x2=\"%.0f\" y2=\"%.0f\" stroke=\"#999\" "
                  "stroke-dasharray=\"5,4\"/>\n",
                  ax, ay + plot, ax + plot, ay);
    svg += buf;
    svg_polyline(svg, report.model.roc, ax, ay, plot, "#1f77b4");
    svg_polyline(svg, report.panel.mean_score.roc, ax, ay, plot, "#ff7f0e");

    std::snprintf(buf, sizeof(buf),
                  "  <text x=\"%.0f\" y=\"%.0f\">false positive rate</text>\n", ax + 90,
                  ay + plot + 35);
    svg += buf;
    std::snprintf(buf, sizeof(buf),
                  "  <text x=\"%.0f\" y=\"%.0f\" transform=\"rotate(-90 %.0f %.0f)\">true "
                  "positive rate</text>\n",
                  ax - 45, ay + plot - 90, ax - 45, ay + plot - 90);
    svg += buf;

    std::snprintf(buf, sizeof(buf),
                  "  <text x=\"%.0f\" y=\"%.0f\" fill=\"#1f77b4\">model AUC %s +/- %s</text>\n",
                  ax + 80, ay + plot - 30, format_double(report.model.bootstrap.mean).c_str(),
                  format_double(report.model.bootstrap.std).c_str());
    svg += buf;
    std::snprintf(buf, sizeof(buf),
                  "  <text x=\"%.0f\" y=\"%.0f\" fill=\"#ff7f0e\">panel AUC %s</text>\n",
                  ax + 80, ay + plot - 10,
                  format_double(report.panel.mean_score.auc_value).c_str());
    svg += buf;

    // --- panel B: PPV / NPV bars ---
    svg += "  <text x=\"480\" y=\"30\" font-size=\"15\" font-weight=\"bold\">B. Predictive "
           "values (operating point: Youden)</text>\n";
    const struct {
        const char* name;
        std::optional<double> ppv;
        std::optional<double> npv;
        const char* color;
    } methods[3] = {
        {"model", report.model.pv_youden.ppv, report.model.pv_youden.npv, "#1f77b4"},
        {"panel", report.panel.mean_score.pv_youden.ppv,
         report.panel.mean_score.pv_youden.npv, "#ff7f0e"},
        {"random", report.baseline.ppv, report.baseline.npv, "#7f7f7f"},
    };
    const double base_y = 370, bar_h_max = 270, bar_w = 42;
    double x = 490;
    for (int group = 0; group < 2; ++group) { // 0 = PPV, 1 = NPV
        std::snprintf(buf, sizeof(buf), "  <text x=\"%.0f\" y=\"%.0f\">%s</text>\n", x + 50,
                      base_y + 25, group == 0 ? "PPV" : "NPV");
        svg += buf;
        for (const auto& m : methods) {
            const std::optional<double> value = group == 0 ? m.ppv : m.npv;
            const double h = value ? *value * bar_h_max : 0.0;
            std::snprintf(buf, sizeof(buf),
                          "  <rect x=\"%.0f\" y=\"%.2f\" width=\"%.0f\" height=\"%.2f\" "
                          "fill=\"%s\"/>\n",
                          x, base_y - h, bar_w, h, m.color);
            svg += buf;
            std::snprintf(buf, sizeof(buf),
                          "  <text x=\"%.0f\" y=\"%.2f\" font-size=\"11\">%s</text>\n", x + 2,
                          base_y - h - 5, format_percent(value).c_str());
            svg += buf;
            x += bar_w + 14;
        }
        x += 40;
    }
    // legend
    x = 490;
    for (const auto& m : methods) {
        std::snprintf(buf, sizeof(buf),
                      "  <rect x=\"%.0f\" y=\"45\" width=\"12\" height=\"12\" fill=\"%s\"/>"
                      "<text x=\"%.0f\" y=\"56\">%s</text>\n",
                      x, m.color, x + 17, m.name);
        svg += buf;
        x += 110;
    }
    svg += "</svg>\n";
    return svg;
}

} // namespace

void emit_report(const EvaluationReport& report, const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create report directory " + dir.string());

    save_report(report, dir / "report.json");
    write_text_file(dir / "roc_model.csv", roc_csv(report.model.roc));
    write_text_file(dir / "roc_panel.csv", roc_csv(report.panel.mean_score.roc));
    write_text_file(dir / "predictions.csv", predictions_csv(report));
    write_text_file(dir / "figure.svg", figure_svg(report));
}

} // namespace ovum::io
