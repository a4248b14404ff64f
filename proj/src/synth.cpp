#include "dprfs/synth.hpp"

#include <cmath>
#include <fstream>
#include <numeric>

#include <nlohmann/json.hpp>

#include "dprfs/rfs_density.hpp"

namespace dprfs {

using nlohmann::json;

StarConfig StarConfig::defaults() {
    StarConfig config;
    const double c = 10.0;
    config.component_means = {
        Vec::Zero(2),
        (Vec(2) << c, c).finished(),
        (Vec(2) << -c, c).finished(),
        (Vec(2) << -c, -c).finished(),
        (Vec(2) << c, -c).finished(),
    };
    config.component_covariances = {
        25.0 * Mat::Identity(2, 2), Mat::Identity(2, 2), Mat::Identity(2, 2),
        Mat::Identity(2, 2),        Mat::Identity(2, 2),
    };
    return config;
}

int StarConfig::dim() const {
    return component_means.empty() ? 0
                                   : static_cast<int>(component_means[0].size());
}

void StarConfig::validate() const {
    if (num_observations < 1)
        throw InputError("StarConfig: num_observations must be >= 1");
    if (component_means.size() != kComponents ||
        component_covariances.size() != kComponents)
        throw InputError("StarConfig: expected 5 means and 5 covariances");
    const double weight_sum =
        std::accumulate(component_weights.begin(), component_weights.end(), 0.0);
    if (std::abs(weight_sum - 1.0) > 1e-9)
        throw InputError("StarConfig: weights must sum to 1");
    for (double w : component_weights)
        if (w < 0.0)
            throw InputError("StarConfig: weights must be nonnegative");
    for (double r : component_rates)
        if (!(r > 0.0))
            throw InputError("StarConfig: rates must be positive");
    const int d = dim();
    if (d < 1)
        throw InputError("StarConfig: dimension must be >= 1");
    for (const Vec &mean : component_means)
        if (mean.size() != d)
            throw InputError("StarConfig: mixed mean dimensions");
    for (const Mat &cov : component_covariances) {
        if (cov.rows() != d || cov.cols() != d)
            throw InputError("StarConfig: covariance shape mismatch");
        Eigen::LLT<Mat> llt(cov);
        if (llt.info() != Eigen::Success)
            throw InputError("StarConfig: covariance not SPD");
    }
}

StarDataset generate_star(const StarConfig &config) {
    config.validate();
    Rng rng(config.seed);

    std::discrete_distribution<int> component(config.component_weights.begin(),
                                              config.component_weights.end());
    StarDataset dataset;
    dataset.data.reserve(static_cast<size_t>(config.num_observations));
    dataset.labels.reserve(static_cast<size_t>(config.num_observations));
    for (int i = 0; i < config.num_observations; ++i) {
        const int k = component(rng);
        const PoissonRfsParams params{
            config.component_rates[static_cast<size_t>(k)],
            GaussianParams{config.component_means[static_cast<size_t>(k)],
                           config.component_covariances[static_cast<size_t>(k)]}};
        dataset.data.push_back(sample_poisson_rfs(params, rng));
        dataset.labels.push_back(k);
    }
    return dataset;
}

namespace {

json vec_to_json(const Vec &v) {
    json out = json::array();
    for (int i = 0; i < v.size(); ++i)
        out.push_back(v(i));
    return out;
}

json mat_to_json(const Mat &m) {
    json out = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < m.cols(); ++j)
            row.push_back(m(i, j));
        out.push_back(row);
    }
    return out;
}

Vec vec_from_json(const json &j) {
    Vec v(j.size());
    for (size_t i = 0; i < j.size(); ++i)
        v(static_cast<int>(i)) = j[i].get<double>();
    return v;
}

Mat mat_from_json(const json &j) {
    const int rows = static_cast<int>(j.size());
    const int cols = rows > 0 ? static_cast<int>(j[0].size()) : 0;
    Mat m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int c = 0; c < cols; ++c)
            m(i, c) = j[static_cast<size_t>(i)][static_cast<size_t>(c)].get<double>();
    return m;
}

json config_to_json(const StarConfig &config) {
    json meta;
    meta["num_observations"] = config.num_observations;
    meta["dim"] = config.dim();
    meta["weights"] = config.component_weights;
    meta["rates"] = config.component_rates;
    json means = json::array();
    for (const Vec &mean : config.component_means)
        means.push_back(vec_to_json(mean));
    meta["means"] = means;
    json covs = json::array();
    for (const Mat &cov : config.component_covariances)
        covs.push_back(mat_to_json(cov));
    meta["covariances"] = covs;
    meta["seed"] = config.seed;
    return meta;
}

StarConfig config_from_json(const json &meta) {
    StarConfig config;
    config.num_observations = meta.at("num_observations").get<int>();
    const auto weights = meta.at("weights").get<std::vector<double>>();
    const auto rates = meta.at("rates").get<std::vector<double>>();
    if (weights.size() != StarConfig::kComponents ||
        rates.size() != StarConfig::kComponents)
        throw InputError("dataset meta: expected 5 weights and 5 rates");
    std::copy(weights.begin(), weights.end(), config.component_weights.begin());
    std::copy(rates.begin(), rates.end(), config.component_rates.begin());
    for (const json &mean : meta.at("means"))
        config.component_means.push_back(vec_from_json(mean));
    for (const json &cov : meta.at("covariances"))
        config.component_covariances.push_back(mat_from_json(cov));
    config.seed = meta.at("seed").get<std::uint64_t>();
    return config;
}

} // namespace

void write_dataset(const std::string &path, const std::vector<PointPattern> &data,
                   const std::vector<int> &labels, const StarConfig &config) {
    if (!labels.empty() && labels.size() != data.size())
        throw InputError("write_dataset: labels length mismatch");

    std::ofstream out(path);
    if (!out)
        throw InputError("write_dataset: cannot open " + path);

    json meta_line;
    meta_line["meta"] = config_to_json(config);
    out << meta_line.dump() << "\n";

    for (size_t i = 0; i < data.size(); ++i) {
        json record;
        record["label"] = labels.empty() ? -1 : labels[i];
        json points = json::array();
        for (const Vec &x : data[i].points())
            points.push_back(vec_to_json(x));
        record["points"] = points;
        out << record.dump() << "\n";
    }
    if (!out)
        throw InputError("write_dataset: write failed for " + path);
}

LoadedDataset read_dataset(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw InputError("read_dataset: cannot open " + path);

    LoadedDataset loaded;
    std::string line;
    int line_number = 0;
    int dim = 0;
    bool any_label = false;

    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty())
            continue;
        json record;
        try {
            record = json::parse(line);
        } catch (const json::parse_error &e) {
            throw InputError("read_dataset: " + path + ":" +
                             std::to_string(line_number) + ": " + e.what());
        }

        if (line_number == 1) {
            if (!record.contains("meta"))
                throw InputError("read_dataset: " + path +
                                 ":1: missing meta record");
            loaded.config = config_from_json(record["meta"]);
            dim = loaded.config.dim();
            if (dim < 1)
                throw InputError("read_dataset: " + path +
                                 ":1: meta dimension must be >= 1");
            continue;
        }

        if (!record.contains("points") || !record["points"].is_array())
            throw InputError("read_dataset: " + path + ":" +
                             std::to_string(line_number) +
                             ": record needs a points array");
        PointPattern pattern(dim);
        for (const json &point : record["points"]) {
            if (!point.is_array() || static_cast<int>(point.size()) != dim)
                throw InputError("read_dataset: " + path + ":" +
                                 std::to_string(line_number) +
                                 ": point dimension mismatch");
            pattern.add_point(vec_from_json(point));
        }
        loaded.data.push_back(std::move(pattern));

        int label = -1;
        if (record.contains("label") && record["label"].is_number_integer())
            label = record["label"].get<int>();
        loaded.labels.push_back(label);
        if (label >= 0)
            any_label = true;
    }
    if (line_number == 0)
        throw InputError("read_dataset: " + path + " is empty");

    loaded.has_labels = any_label;
    if (!any_label)
        loaded.labels.clear();
    return loaded;
}

} // namespace dprfs
