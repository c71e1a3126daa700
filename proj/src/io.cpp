#include "gfa/io.hpp"

#include <fstream>

#include "gfa/error.hpp"

namespace gfa {

using nlohmann::json;

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const json& j) {
    if (!j.is_array()) throw IoError("expected a matrix as nested arrays");
    const auto rows = static_cast<Index>(j.size());
    const auto cols = rows ? static_cast<Index>(j[0].size()) : 0;
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        if (static_cast<Index>(j[i].size()) != cols) throw IoError("ragged matrix in JSON");
        for (Index c = 0; c < cols; ++c) m(i, c) = j[i][c].get<double>();
    }
    return m;
}

json binary_to_json(const BinaryMatrix& m) {
    json rows = json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

BinaryMatrix binary_from_json(const json& j) { return matrix_from_json(j).cast<int>(); }

namespace {

json vector_to_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Vector vector_from_json(const json& j) {
    const auto values = j.get<std::vector<double>>();
    return Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()));
}

json partition_to_json(const ViewPartition& p) { return {{"dims", p.dims()}, {"names", p.names()}}; }

ViewPartition partition_from_json(const json& j) {
    return ViewPartition(j.at("dims").get<std::vector<Index>>(),
                         j.value("names", std::vector<std::string>{}));
}

}  // namespace

json to_json(const FitConfig& c) {
    return {
        {"K", c.K},
        {"max_iter", c.max_iter},
        {"elbo_rel_tol", c.elbo_rel_tol},
        {"rotation_enabled", c.rotation_enabled},
        {"rotation_period", c.rotation_period},
        {"rotation_start", c.rotation_start},
        {"precision_warmup", c.precision_warmup},
        {"seed", c.seed},
        {"epsilon", c.epsilon},
        {"hyper",
         {{"a0", c.hyper.a0},
          {"b0", c.hyper.b0},
          {"a_tau0", c.hyper.a_tau0},
          {"b_tau0", c.hyper.b_tau0},
          {"prior_mode", to_string(c.hyper.prior_mode)}}},
        {"rotation",
         {{"max_iter", c.rotation.max_iter},
          {"grad_tol", c.rotation.grad_tol},
          {"memory", c.rotation.memory},
          {"quad_floor", c.rotation.quad_floor},
          {"value_rel_tol", c.rotation.value_rel_tol}}},
    };
}

FitConfig fit_config_from_json(const json& j) {
    FitConfig c;
    c.K = j.at("K").get<Index>();
    c.max_iter = j.at("max_iter").get<int>();
    c.elbo_rel_tol = j.at("elbo_rel_tol").get<double>();
    c.rotation_enabled = j.at("rotation_enabled").get<bool>();
    c.rotation_period = j.at("rotation_period").get<int>();
    c.rotation_start = j.at("rotation_start").get<int>();
    c.precision_warmup = j.value("precision_warmup", 0);
    c.seed = j.at("seed").get<std::uint64_t>();
    c.epsilon = j.value("epsilon", kDefaultEpsilon);
    const auto& h = j.at("hyper");
    c.hyper.a0 = h.at("a0").get<double>();
    c.hyper.b0 = h.at("b0").get<double>();
    c.hyper.a_tau0 = h.at("a_tau0").get<double>();
    c.hyper.b_tau0 = h.at("b_tau0").get<double>();
    c.hyper.prior_mode = prior_mode_from_string(h.at("prior_mode").get<std::string>());
    if (j.contains("rotation")) {
        const auto& r = j["rotation"];
        c.rotation.max_iter = r.at("max_iter").get<int>();
        c.rotation.grad_tol = r.at("grad_tol").get<double>();
        c.rotation.memory = r.at("memory").get<int>();
        c.rotation.quad_floor = r.at("quad_floor").get<double>();
        c.rotation.value_rel_tol = r.value("value_rel_tol", c.rotation.value_rel_tol);
    }
    return c;
}

json to_json(const ModelFile& model) {
    const auto& q = model.result.posterior;
    json w_mean = json::array();
    json w_cov = json::array();
    for (Index m = 0; m < q.view_count(); ++m) {
        w_mean.push_back(matrix_to_json(q.w_mean[m]));
        w_cov.push_back(matrix_to_json(q.w_cov[m]));
    }
    json preprocess = {
        {"centered", model.centered},
        {"means", vector_to_json(model.preprocess.means)},
        {"scales", model.preprocess.scaled() ? vector_to_json(model.preprocess.scales) : json(nullptr)},
        {"constant_columns", model.preprocess.constant_columns},
    };
    return {
        {"format", "gfa-model"},
        {"version", 1},
        {"config", to_json(model.config)},
        {"preprocess", std::move(preprocess)},
        {"partition", partition_to_json(model.partition)},
        {"n_samples", model.n_samples},
        {"fit",
         {{"n_iter", model.result.n_iter},
          {"converged", model.result.converged},
          {"empty_factor_count", model.result.empty_factor_count},
          {"rotations_applied", model.result.rotations_applied},
          {"final_elbo", model.result.elbo_trace.empty() ? json(nullptr) : json(model.result.elbo_trace.back())},
          {"elbo_trace", model.result.elbo_trace}}},
        {"posterior",
         {{"z_mean", matrix_to_json(q.z_mean)},
          {"z_cov", matrix_to_json(q.z_cov)},
          {"w_mean", std::move(w_mean)},
          {"w_cov", std::move(w_cov)},
          {"alpha_shape", matrix_to_json(q.alpha_shape)},
          {"alpha_rate", matrix_to_json(q.alpha_rate)},
          {"tau_shape", vector_to_json(q.tau_shape)},
          {"tau_rate", vector_to_json(q.tau_rate)}}},
    };
}

ModelFile model_from_json(const json& j) {
    try {
        if (j.value("format", "") != "gfa-model") throw IoError("not a gfa model file");
        ModelFile model;
        model.config = fit_config_from_json(j.at("config"));
        const auto& pre = j.at("preprocess");
        model.centered = pre.value("centered", true);
        model.preprocess.means = vector_from_json(pre.at("means"));
        if (!pre.at("scales").is_null()) model.preprocess.scales = vector_from_json(pre["scales"]);
        model.preprocess.constant_columns = pre.value("constant_columns", std::vector<Index>{});
        model.partition = partition_from_json(j.at("partition"));
        model.n_samples = j.at("n_samples").get<Index>();
        const auto& f = j.at("fit");
        model.result.n_iter = f.at("n_iter").get<int>();
        model.result.converged = f.at("converged").get<bool>();
        model.result.empty_factor_count = f.at("empty_factor_count").get<Index>();
        model.result.rotations_applied = f.value("rotations_applied", 0);
        model.result.elbo_trace = f.at("elbo_trace").get<std::vector<double>>();
        const auto& p = j.at("posterior");
        auto& q = model.result.posterior;
        q.z_mean = matrix_from_json(p.at("z_mean"));
        q.z_cov = matrix_from_json(p.at("z_cov"));
        for (const auto& w : p.at("w_mean")) q.w_mean.push_back(matrix_from_json(w));
        for (const auto& w : p.at("w_cov")) q.w_cov.push_back(matrix_from_json(w));
        q.alpha_shape = matrix_from_json(p.at("alpha_shape"));
        q.alpha_rate = matrix_from_json(p.at("alpha_rate"));
        q.tau_shape = vector_from_json(p.at("tau_shape"));
        q.tau_rate = vector_from_json(p.at("tau_rate"));
        if (q.view_count() != model.partition.view_count())
            throw IoError("model posterior and partition disagree on the number of views");
        return model;
    } catch (const json::exception& e) {
        throw IoError(std::string("malformed model file: ") + e.what());
    }
}

json to_json(const GroundTruth& truth) {
    return {
        {"format", "gfa-truth"},
        {"partition", partition_to_json(truth.partition)},
        {"F", binary_to_json(truth.F)},
        {"W", matrix_to_json(truth.W)},
        {"noise_variance", vector_to_json(truth.noise_variance)},
    };
}

GroundTruth truth_from_json(const json& j) {
    try {
        GroundTruth t;
        t.partition = partition_from_json(j.at("partition"));
        t.F = binary_from_json(j.at("F"));
        t.W = matrix_from_json(j.at("W"));
        t.noise_variance = vector_from_json(j.at("noise_variance"));
        if (t.F.cols() != t.partition.view_count() || t.W.rows() != t.partition.total_dim() ||
            t.W.cols() != t.F.rows())
            throw IoError("truth file has inconsistent shapes");
        return t;
    } catch (const json::exception& e) {
        throw IoError(std::string("malformed truth file: ") + e.what());
    }
}

json to_json(const ActivityMatrix& a, const std::vector<Index>& order) {
    json cardinality = json::array();
    for (Index k = 0; k < a.factors(); ++k) cardinality.push_back(a.cardinality(k));
    return {
        {"epsilon", a.epsilon},
        {"F", binary_to_json(a.F)},
        {"variance_share", matrix_to_json(a.variance_share)},
        {"threshold", vector_to_json(a.threshold)},
        {"cardinality", std::move(cardinality)},
        {"empty_factor_count", a.empty_count()},
        {"order", order},
    };
}

json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw IoError(path.string() + ": " + e.what());
    }
}

void write_json(const std::filesystem::path& path, const json& j) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << j.dump(2) << '\n';
    if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace gfa
