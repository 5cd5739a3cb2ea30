#include "mfid/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mfid/io.hpp"

namespace mfid::surrogate {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr int kFormatVersion = 1;

double activate(double z, Activation a, double slope)
{
    switch (a) {
    case Activation::relu:
        return z > 0.0 ? z : 0.0;
    case Activation::leaky_relu:
        return z > 0.0 ? z : slope * z;
    case Activation::linear:
        break;
    }
    return z;
}

double activate_grad(double z, Activation a, double slope)
{
    switch (a) {
    case Activation::relu:
        return z > 0.0 ? 1.0 : 0.0;
    case Activation::leaky_relu:
        return z > 0.0 ? 1.0 : slope;
    case Activation::linear:
        break;
    }
    return 1.0;
}

// Activations of one forward pass over a batch (one column per sample).
struct Pass {
    std::vector<MatrixXd> inputs;  // input to each layer
    std::vector<MatrixXd> pre;     // pre-activation of each hidden layer
    std::vector<MatrixXd> masks;   // scaled dropout masks (empty when unused)
    MatrixXd out;                  // 1 x batch
};

void forward(const SurrogateModel& m, const MatrixXd& x, Pass& pass, const std::vector<double>* dropout,
             std::mt19937_64* rng)
{
    const std::size_t hidden = m.layers.size() - 1;
    pass.inputs.resize(m.layers.size());
    pass.pre.resize(hidden);
    pass.masks.assign(hidden, MatrixXd());
    pass.inputs[0] = x;
    for (std::size_t l = 0; l < hidden; ++l) {
        const DenseLayer& layer = m.layers[l];
        MatrixXd& z = pass.pre[l];
        z.noalias() = layer.weights * pass.inputs[l];
        z.colwise() += layer.bias;
        MatrixXd a = z.unaryExpr([&](double v) { return activate(v, m.activation, m.leaky_slope); });
        const double p = dropout ? (*dropout)[l] : 0.0;
        if (p > 0.0) {
            std::bernoulli_distribution keep(1.0 - p);
            MatrixXd mask(a.rows(), a.cols());
            const double scale = 1.0 / (1.0 - p);
            for (Eigen::Index j = 0; j < mask.cols(); ++j)
                for (Eigen::Index i = 0; i < mask.rows(); ++i)
                    mask(i, j) = keep(*rng) ? scale : 0.0;
            a.array() *= mask.array();
            pass.masks[l] = std::move(mask);
        }
        pass.inputs[l + 1] = std::move(a);
    }
    const DenseLayer& last = m.layers.back();
    pass.out.noalias() = last.weights * pass.inputs.back();
    pass.out.colwise() += last.bias;
}

struct Gradients {
    std::vector<MatrixXd> weights;
    std::vector<VectorXd> bias;
};

// dout: derivative of the loss with respect to each output (1 x batch).
void backward(const SurrogateModel& m, const Pass& pass, const MatrixXd& dout, Gradients& g)
{
    const std::size_t count = m.layers.size();
    g.weights.resize(count);
    g.bias.resize(count);
    MatrixXd delta = dout;
    for (std::size_t l = count; l-- > 0;) {
        g.weights[l].noalias() = delta * pass.inputs[l].transpose();
        g.bias[l] = delta.rowwise().sum();
        if (l == 0)
            break;
        MatrixXd da = m.layers[l].weights.transpose() * delta;
        if (pass.masks[l - 1].size() > 0)
            da.array() *= pass.masks[l - 1].array();
        const MatrixXd& z = pass.pre[l - 1];
        for (Eigen::Index j = 0; j < da.cols(); ++j)
            for (Eigen::Index i = 0; i < da.rows(); ++i)
                da(i, j) *= activate_grad(z(i, j), m.activation, m.leaky_slope);
        delta = std::move(da);
    }
}

MatrixXd standardized_matrix(const SurrogateModel& m, const std::vector<Vector>& xs,
                             const std::vector<std::size_t>& rows)
{
    MatrixXd out(static_cast<Eigen::Index>(m.input_dim()), static_cast<Eigen::Index>(rows.size()));
    for (std::size_t c = 0; c < rows.size(); ++c)
        out.col(static_cast<Eigen::Index>(c)) = m.standardize(xs[rows[c]]);
    return out;
}

double standardized_mse(const SurrogateModel& m, const MatrixXd& x, const MatrixXd& y)
{
    Pass pass;
    forward(m, x, pass, nullptr, nullptr);
    return (pass.out - y).squaredNorm() / static_cast<double>(y.cols());
}

void check_dims(const SurrogateModel& m, std::size_t n)
{
    if (n != m.input_dim())
        throw std::invalid_argument("surrogate: expected input of dimension " + std::to_string(m.input_dim()) +
                                    ", got " + std::to_string(n));
}

}  // namespace

std::string to_string(Activation a)
{
    switch (a) {
    case Activation::relu:
        return "relu";
    case Activation::leaky_relu:
        return "leaky_relu";
    case Activation::linear:
        break;
    }
    return "linear";
}

Activation parse_activation(const std::string& s)
{
    if (s == "relu")
        return Activation::relu;
    if (s == "leaky_relu")
        return Activation::leaky_relu;
    if (s == "linear")
        return Activation::linear;
    throw std::invalid_argument("unknown activation '" + s + "'");
}

MlpConfig MlpConfig::sfr_default()
{
    MlpConfig c;
    c.widths = {388, 322};
    c.activation = Activation::relu;
    c.dropout = {0.1, 0.0};
    c.epochs = 500;
    c.batch_size = 64;
    c.learning_rate = 6e-4;
    return c;
}

MlpConfig MlpConfig::aid_default()
{
    MlpConfig c;
    c.widths = {92, 116, 34};
    c.activation = Activation::leaky_relu;
    c.dropout = {0.1, 0.1, 0.0};
    c.epochs = 100;
    c.batch_size = 128;
    c.learning_rate = 8.3e-4;
    return c;
}

MlpConfig MlpConfig::for_problem(Problem p)
{
    return p == Problem::aid ? aid_default() : sfr_default();
}

void MlpConfig::validate() const
{
    if (widths.empty())
        throw std::invalid_argument("mlp: at least one hidden layer required");
    if (dropout.size() != widths.size())
        throw std::invalid_argument("mlp: one dropout rate per hidden layer required");
    for (int w : widths)
        if (w < 1)
            throw std::invalid_argument("mlp: layer widths must be >= 1");
    for (double p : dropout)
        if (!(p >= 0.0 && p < 1.0))
            throw std::invalid_argument("mlp: dropout must be in [0, 1)");
    if (epochs < 0 || batch_size < 1 || !(learning_rate > 0.0) || patience < 1)
        throw std::invalid_argument("mlp: invalid epochs, batch size, learning rate or patience");
    if (!(validation_fraction > 0.0 && validation_fraction < 1.0))
        throw std::invalid_argument("mlp: validation fraction must be in (0, 1)");
}

Eigen::VectorXd SurrogateModel::standardize(std::span<const double> x) const
{
    check_dims(*this, x.size());
    VectorXd v(static_cast<Eigen::Index>(x.size()));
    for (std::size_t i = 0; i < x.size(); ++i)
        v[static_cast<Eigen::Index>(i)] = (x[i] - input_mean[static_cast<Eigen::Index>(i)]) /
                                          input_scale[static_cast<Eigen::Index>(i)];
    return v;
}

double SurrogateModel::predict(std::span<const double> x) const
{
    VectorXd a = standardize(x);
    const std::size_t hidden = layers.size() - 1;
    for (std::size_t l = 0; l < hidden; ++l) {
        VectorXd z = layers[l].weights * a + layers[l].bias;
        a = z.unaryExpr([&](double v) { return activate(v, activation, leaky_slope); });
    }
    const double out = layers.back().weights.row(0).dot(a) + layers.back().bias[0];
    return label_mean + label_scale * out;
}

Vector SurrogateModel::predict(const std::vector<Vector>& xs) const
{
    Vector out;
    out.reserve(xs.size());
    for (const Vector& x : xs)
        out.push_back(predict(x));
    return out;
}

std::size_t SurrogateModel::parameter_count() const
{
    std::size_t n = 0;
    for (const DenseLayer& l : layers)
        n += static_cast<std::size_t>(l.weights.size() + l.bias.size());
    return n;
}

SurrogateModel initialize(std::size_t input_dim, const MlpConfig& cfg, std::uint64_t seed)
{
    cfg.validate();
    if (input_dim == 0)
        throw std::invalid_argument("mlp: input dimension must be >= 1");
    SurrogateModel m;
    m.activation = cfg.activation;
    m.leaky_slope = cfg.leaky_slope;
    m.input_mean = VectorXd::Zero(static_cast<Eigen::Index>(input_dim));
    m.input_scale = VectorXd::Ones(static_cast<Eigen::Index>(input_dim));
    std::mt19937_64 rng(seed);
    std::vector<int> shape{static_cast<int>(input_dim)};
    shape.insert(shape.end(), cfg.widths.begin(), cfg.widths.end());
    shape.push_back(1);
    const double gain = cfg.activation == Activation::linear ? 3.0 : 6.0;
    for (std::size_t l = 0; l + 1 < shape.size(); ++l) {
        const double limit = std::sqrt(gain / shape[l]);
        std::uniform_real_distribution<double> u(-limit, limit);
        DenseLayer layer;
        layer.weights.resize(shape[l + 1], shape[l]);
        for (Eigen::Index j = 0; j < layer.weights.cols(); ++j)
            for (Eigen::Index i = 0; i < layer.weights.rows(); ++i)
                layer.weights(i, j) = u(rng);
        layer.bias = VectorXd::Zero(shape[l + 1]);
        m.layers.push_back(std::move(layer));
    }
    return m;
}

SurrogateModel train(const dataset::Dataset& data, const MlpConfig& cfg, std::uint64_t seed)
{
    cfg.validate();
    data.validate();
    const std::size_t n = data.size();
    if (n < 10)
        throw std::invalid_argument("train: at least 10 rows required");
    const std::size_t dim = data.dim();

    SurrogateModel m = initialize(dim, cfg, split_seed(seed, 0));
    std::mt19937_64 rng(split_seed(seed, 1));

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    const auto n_val = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::llround(cfg.validation_fraction * static_cast<double>(n))), 1, n - 1);
    const std::vector<std::size_t> train_rows(order.begin(), order.end() - static_cast<std::ptrdiff_t>(n_val));
    const std::vector<std::size_t> val_rows(order.end() - static_cast<std::ptrdiff_t>(n_val), order.end());

    // standardization statistics from the training split
    const auto nt = static_cast<double>(train_rows.size());
    for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(dim); ++j) {
        double mean = 0.0;
        for (std::size_t r : train_rows)
            mean += data.inputs[r][j];
        mean /= nt;
        double var = 0.0;
        for (std::size_t r : train_rows)
            var += (data.inputs[r][j] - mean) * (data.inputs[r][j] - mean);
        const double sd = std::sqrt(var / nt);
        m.input_mean[j] = mean;
        m.input_scale[j] = sd > 1e-12 ? sd : 1.0;
    }
    {
        double mean = 0.0;
        for (std::size_t r : train_rows)
            mean += data.labels[r];
        mean /= nt;
        double var = 0.0;
        for (std::size_t r : train_rows)
            var += (data.labels[r] - mean) * (data.labels[r] - mean);
        const double sd = std::sqrt(var / nt);
        m.label_mean = mean;
        m.label_scale = sd > 1e-12 ? sd : 1.0;
    }

    const MatrixXd x_train = standardized_matrix(m, data.inputs, train_rows);
    const MatrixXd x_val = standardized_matrix(m, data.inputs, val_rows);
    MatrixXd y_train(1, x_train.cols()), y_val(1, x_val.cols());
    for (std::size_t c = 0; c < train_rows.size(); ++c)
        y_train(0, static_cast<Eigen::Index>(c)) = (data.labels[train_rows[c]] - m.label_mean) / m.label_scale;
    for (std::size_t c = 0; c < val_rows.size(); ++c)
        y_val(0, static_cast<Eigen::Index>(c)) = (data.labels[val_rows[c]] - m.label_mean) / m.label_scale;

    // Adam state
    constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-7;
    std::vector<MatrixXd> mw, vw;
    std::vector<VectorXd> mb, vb;
    for (const DenseLayer& l : m.layers) {
        mw.push_back(MatrixXd::Zero(l.weights.rows(), l.weights.cols()));
        vw.push_back(MatrixXd::Zero(l.weights.rows(), l.weights.cols()));
        mb.push_back(VectorXd::Zero(l.bias.size()));
        vb.push_back(VectorXd::Zero(l.bias.size()));
    }
    long step = 0;

    std::vector<DenseLayer> best_layers = m.layers;
    double best_val = std::numeric_limits<double>::infinity();
    int since_best = 0;
    std::vector<Eigen::Index> perm(train_rows.size());
    std::iota(perm.begin(), perm.end(), Eigen::Index{0});
    Pass pass;
    Gradients grad;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(perm.begin(), perm.end(), rng);
        double loss_sum = 0.0;
        std::size_t batches = 0;
        for (std::size_t start = 0; start < perm.size(); start += static_cast<std::size_t>(cfg.batch_size)) {
            const std::size_t stop = std::min(perm.size(), start + static_cast<std::size_t>(cfg.batch_size));
            const std::vector<Eigen::Index> idx(perm.begin() + static_cast<std::ptrdiff_t>(start),
                                                perm.begin() + static_cast<std::ptrdiff_t>(stop));
            const MatrixXd xb = x_train(Eigen::all, idx);
            const MatrixXd yb = y_train(Eigen::all, idx);
            forward(m, xb, pass, &cfg.dropout, &rng);
            const MatrixXd err = pass.out - yb;
            const double loss = err.squaredNorm() / static_cast<double>(idx.size());
            if (!std::isfinite(loss)) {
                std::ostringstream msg;
                msg << "training diverged at epoch " << epoch << " (batch loss " << loss << ", learning rate "
                    << cfg.learning_rate << ")";
                throw TrainingDiverged(msg.str());
            }
            loss_sum += loss;
            ++batches;
            backward(m, pass, (2.0 / static_cast<double>(idx.size())) * err, grad);
            ++step;
            const double c1 = 1.0 - std::pow(beta1, static_cast<double>(step));
            const double c2 = 1.0 - std::pow(beta2, static_cast<double>(step));
            const double lr = cfg.learning_rate * std::sqrt(c2) / c1;
            for (std::size_t l = 0; l < m.layers.size(); ++l) {
                mw[l] = beta1 * mw[l] + (1.0 - beta1) * grad.weights[l];
                vw[l] = beta2 * vw[l] + (1.0 - beta2) * grad.weights[l].cwiseAbs2();
                m.layers[l].weights.array() -= lr * mw[l].array() / (vw[l].array().sqrt() + eps);
                mb[l] = beta1 * mb[l] + (1.0 - beta1) * grad.bias[l];
                vb[l] = beta2 * vb[l] + (1.0 - beta2) * grad.bias[l].cwiseAbs2();
                m.layers[l].bias.array() -= lr * mb[l].array() / (vb[l].array().sqrt() + eps);
            }
        }
        const double val = standardized_mse(m, x_val, y_val);
        if (!std::isfinite(val))
            throw TrainingDiverged("training diverged at epoch " + std::to_string(epoch) +
                                   " (non-finite validation loss)");
        m.history.train_loss.push_back(loss_sum / static_cast<double>(batches));
        m.history.validation_loss.push_back(val);
        if (val < best_val) {
            best_val = val;
            best_layers = m.layers;
            m.history.best_epoch = epoch;
            since_best = 0;
        } else if (++since_best >= cfg.patience) {
            m.history.stopped_early = true;
            break;
        }
    }
    m.layers = std::move(best_layers);
    return m;
}

double rmse(const SurrogateModel& model, const std::vector<Vector>& xs, const Vector& ys)
{
    if (xs.size() != ys.size() || xs.empty())
        throw std::invalid_argument("rmse: mismatched or empty inputs");
    double acc = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double d = model.predict(xs[i]) - ys[i];
        acc += d * d;
    }
    return std::sqrt(acc / static_cast<double>(xs.size()));
}

KFoldResult kfold_rmse(const dataset::Dataset& data, const MlpConfig& cfg, int k, std::uint64_t seed)
{
    if (k < 2)
        throw std::invalid_argument("kfold_rmse: k must be at least 2");
    const std::size_t n = data.size();
    if (n < static_cast<std::size_t>(k))
        throw std::invalid_argument("kfold_rmse: fewer rows than folds");
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(split_seed(seed, 100));
    std::shuffle(order.begin(), order.end(), rng);

    KFoldResult res;
    for (int f = 0; f < k; ++f) {
        const std::size_t lo = n * static_cast<std::size_t>(f) / static_cast<std::size_t>(k);
        const std::size_t hi = n * static_cast<std::size_t>(f + 1) / static_cast<std::size_t>(k);
        dataset::Dataset fit;
        std::vector<Vector> test_x;
        Vector test_y;
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t r = order[i];
            if (i >= lo && i < hi) {
                test_x.push_back(data.inputs[r]);
                test_y.push_back(data.labels[r]);
            } else {
                fit.inputs.push_back(data.inputs[r]);
                fit.labels.push_back(data.labels[r]);
            }
        }
        const SurrogateModel m = train(fit, cfg, split_seed(seed, 200 + static_cast<std::uint64_t>(f)));
        res.fold_rmse.push_back(rmse(m, test_x, test_y));
    }
    res.mean_rmse = std::accumulate(res.fold_rmse.begin(), res.fold_rmse.end(), 0.0) / k;
    double var = 0.0;
    for (double r : res.fold_rmse)
        var += (r - res.mean_rmse) * (r - res.mean_rmse);
    res.std_rmse = std::sqrt(var / k);
    return res;
}

SurrogateModel fit_with_cv(const dataset::Dataset& data, const MlpConfig& cfg, int k, std::uint64_t seed)
{
    const KFoldResult cv = kfold_rmse(data, cfg, k, seed);
    SurrogateModel m = train(data, cfg, seed);
    m.cv_rmse = cv.mean_rmse;
    return m;
}

Vector flatten_parameters(const SurrogateModel& model)
{
    Vector out;
    out.reserve(model.parameter_count());
    for (const DenseLayer& l : model.layers) {
        out.insert(out.end(), l.weights.data(), l.weights.data() + l.weights.size());
        out.insert(out.end(), l.bias.data(), l.bias.data() + l.bias.size());
    }
    return out;
}

void assign_parameters(SurrogateModel& model, std::span<const double> params)
{
    if (params.size() != model.parameter_count())
        throw std::invalid_argument("assign_parameters: wrong parameter count");
    std::size_t k = 0;
    for (DenseLayer& l : model.layers) {
        std::copy_n(params.begin() + static_cast<std::ptrdiff_t>(k), l.weights.size(), l.weights.data());
        k += static_cast<std::size_t>(l.weights.size());
        std::copy_n(params.begin() + static_cast<std::ptrdiff_t>(k), l.bias.size(), l.bias.data());
        k += static_cast<std::size_t>(l.bias.size());
    }
}

double gradient_check(const SurrogateModel& model, std::span<const double> x, double y,
                      std::span<const double> direction, double h)
{
    const Vector theta = flatten_parameters(model);
    if (direction.size() != theta.size())
        throw std::invalid_argument("gradient_check: direction length must equal parameter count");

    const MatrixXd xs = model.standardize(x);
    Pass pass;
    forward(model, xs, pass, nullptr, nullptr);
    const double f = model.label_mean + model.label_scale * pass.out(0, 0);
    MatrixXd dout(1, 1);
    dout(0, 0) = 2.0 * (f - y) * model.label_scale;
    Gradients g;
    backward(model, pass, dout, g);
    double analytic = 0.0;
    std::size_t k = 0;
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        for (Eigen::Index i = 0; i < g.weights[l].size(); ++i)
            analytic += g.weights[l].data()[i] * direction[k++];
        for (Eigen::Index i = 0; i < g.bias[l].size(); ++i)
            analytic += g.bias[l][i] * direction[k++];
    }

    auto loss_at = [&](double step) {
        SurrogateModel probe = model;
        Vector p = theta;
        for (std::size_t i = 0; i < p.size(); ++i)
            p[i] += step * direction[i];
        assign_parameters(probe, p);
        const double d = probe.predict(x) - y;
        return d * d;
    };
    const double numeric = (loss_at(h) - loss_at(-h)) / (2.0 * h);
    const double scale = std::max(std::abs(analytic), std::abs(numeric));
    if (scale == 0.0)
        return 0.0;
    return std::abs(analytic - numeric) / scale;
}

namespace {

nlohmann::json matrix_json(const MatrixXd& a)
{
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            row.push_back(a(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

nlohmann::json vector_json(const VectorXd& v)
{
    return nlohmann::json(std::vector<double>(v.data(), v.data() + v.size()));
}

VectorXd vector_from(const nlohmann::json& j)
{
    const auto v = j.get<std::vector<double>>();
    return Eigen::Map<const VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

std::string to_json(const SurrogateModel& model)
{
    nlohmann::ordered_json j;
    j["format"] = "mfid-mlp";
    j["version"] = kFormatVersion;
    j["activation"] = to_string(model.activation);
    j["leaky_slope"] = model.leaky_slope;
    j["input_mean"] = vector_json(model.input_mean);
    j["input_scale"] = vector_json(model.input_scale);
    j["label_mean"] = model.label_mean;
    j["label_scale"] = model.label_scale;
    j["cv_rmse"] = model.cv_rmse;
    j["best_epoch"] = model.history.best_epoch;
    nlohmann::ordered_json layers = nlohmann::ordered_json::array();
    for (const DenseLayer& l : model.layers) {
        nlohmann::ordered_json lj;
        lj["weights"] = matrix_json(l.weights);
        lj["bias"] = vector_json(l.bias);
        layers.push_back(std::move(lj));
    }
    j["layers"] = std::move(layers);
    return j.dump() + "\n";
}

SurrogateModel from_json(const std::string& text)
{
    const nlohmann::json j = nlohmann::json::parse(text);
    if (j.value("format", std::string()) != "mfid-mlp")
        throw std::runtime_error("model file: unrecognized format");
    if (j.at("version").get<int>() != kFormatVersion)
        throw std::runtime_error("model file: unsupported version " + j.at("version").dump());
    SurrogateModel m;
    m.activation = parse_activation(j.at("activation").get<std::string>());
    m.leaky_slope = j.at("leaky_slope").get<double>();
    m.input_mean = vector_from(j.at("input_mean"));
    m.input_scale = vector_from(j.at("input_scale"));
    m.label_mean = j.at("label_mean").get<double>();
    m.label_scale = j.at("label_scale").get<double>();
    m.cv_rmse = j.at("cv_rmse").get<double>();
    m.history.best_epoch = j.value("best_epoch", -1);
    Eigen::Index prev = m.input_mean.size();
    for (const auto& lj : j.at("layers")) {
        const auto rows = lj.at("weights").get<std::vector<std::vector<double>>>();
        DenseLayer l;
        l.weights.resize(static_cast<Eigen::Index>(rows.size()), prev);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (static_cast<Eigen::Index>(rows[r].size()) != prev)
                throw std::runtime_error("model file: layer shape mismatch");
            for (std::size_t c = 0; c < rows[r].size(); ++c)
                l.weights(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
        }
        l.bias = vector_from(lj.at("bias"));
        if (l.bias.size() != l.weights.rows())
            throw std::runtime_error("model file: bias shape mismatch");
        prev = l.weights.rows();
        m.layers.push_back(std::move(l));
    }
    if (m.layers.size() < 2 || prev != 1 || m.input_scale.size() != m.input_mean.size())
        throw std::runtime_error("model file: inconsistent network shape");
    return m;
}

void save_model(const SurrogateModel& model, const std::string& path)
{
    io::write_text(path, to_json(model));
}

SurrogateModel load_model(const std::string& path)
{
    return from_json(io::read_text(path));
}

}  // namespace mfid::surrogate
