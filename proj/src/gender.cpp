#include "scicert/gender.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <json.hpp>
#include <numeric>
#include <random>
#include <set>

#include "scicert/stats.hpp"
#include "scicert/util.hpp"

namespace scicert {

bool name_abbreviated(const std::string& name) {
    std::string n = trim(name);
    if (n.size() == 1 && std::isalpha(static_cast<unsigned char>(n[0]))) return true;
    if (n.size() == 2 && std::isalpha(static_cast<unsigned char>(n[0])) && n[1] == '.') return true;
    return false;
}

std::vector<NameSample> load_name_samples(const std::string& path) {
    std::vector<NameSample> out;
    std::size_t lineno = 0;
    for (const auto& line : read_lines(path)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto cols = split(t, ',');
        if (cols.size() != 3)
            throw PipelineError("names file line " + std::to_string(lineno) + ": expected 3 columns");
        if (lineno == 1 && lower(trim(cols[0])) == "name") continue;  // header
        NameSample s;
        s.name = trim(cols[0]);
        std::string sex = lower(trim(cols[1]));
        if (sex == "m") s.sex = 'M';
        else if (sex == "f") s.sex = 'F';
        else throw PipelineError("names file line " + std::to_string(lineno) + ": bad sex '" + cols[1] + "'");
        auto c = parse_double(trim(cols[2]));
        if (!c || *c <= 0)
            throw PipelineError("names file line " + std::to_string(lineno) + ": bad count");
        s.count = *c;
        out.push_back(std::move(s));
    }
    return out;
}

namespace {

constexpr int kMinGram = 1;
constexpr int kMaxGram = 9;

std::map<std::string, double> gram_counts(const std::string& name) {
    std::string marked = "^" + lower(trim(name)) + "$";
    std::map<std::string, double> counts;
    for (int n = kMinGram; n <= kMaxGram; ++n) {
        if (static_cast<std::size_t>(n) > marked.size()) break;
        for (std::size_t i = 0; i + n <= marked.size(); ++i) counts[marked.substr(i, n)] += 1.0;
    }
    return counts;
}

double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    double e = std::exp(z);
    return e / (1.0 + e);
}

// log(1 + exp(-m)) without overflow
double log1pexp_neg(double m) {
    if (m > 35.0) return std::exp(-m);
    if (m < -35.0) return -m;
    return std::log1p(std::exp(-m));
}

struct Problem {
    std::vector<SparseVec> rows;
    std::vector<double> y;       // +1 male, -1 female
    std::vector<double> sw;      // sample weights
    double c = 2.0;
    std::size_t dim = 0;         // features; parameter vector is dim+1 (bias last)

    double eval(const std::vector<double>& w, std::vector<double>& grad) const {
        grad.assign(dim + 1, 0.0);
        double f = 0.0;
        for (std::size_t j = 0; j < dim; ++j) {
            f += 0.5 * w[j] * w[j];
            grad[j] = w[j];
        }
        for (std::size_t i = 0; i < rows.size(); ++i) {
            double z = w[dim];
            for (const auto& [col, val] : rows[i].items) z += w[col] * val;
            double m = y[i] * z;
            f += c * sw[i] * log1pexp_neg(m);
            double g = -c * sw[i] * y[i] * sigmoid(-m);
            for (const auto& [col, val] : rows[i].items) grad[col] += g * val;
            grad[dim] += g;
        }
        return f;
    }
};

// Two-loop L-BFGS with Armijo backtracking; fully deterministic.
int lbfgs_minimize(const Problem& prob, std::vector<double>& w, int max_iter, double tol) {
    const std::size_t m = 10;
    std::deque<std::vector<double>> s_hist, y_hist;
    std::deque<double> rho_hist;
    std::vector<double> grad, grad_new;
    double f = prob.eval(w, grad);
    int iter = 0;
    for (; iter < max_iter; ++iter) {
        double gnorm = 0.0;
        for (double g : grad) gnorm = std::max(gnorm, std::fabs(g));
        if (gnorm <= tol * std::max(1.0, std::fabs(f))) break;

        // Two-loop recursion for the search direction.
        std::vector<double> q = grad;
        std::vector<double> alpha(s_hist.size());
        for (std::size_t i = s_hist.size(); i-- > 0;) {
            double a = 0.0;
            for (std::size_t j = 0; j < q.size(); ++j) a += s_hist[i][j] * q[j];
            a *= rho_hist[i];
            alpha[i] = a;
            for (std::size_t j = 0; j < q.size(); ++j) q[j] -= a * y_hist[i][j];
        }
        if (!s_hist.empty()) {
            double sy = 0.0, yy = 0.0;
            for (std::size_t j = 0; j < q.size(); ++j) {
                sy += s_hist.back()[j] * y_hist.back()[j];
                yy += y_hist.back()[j] * y_hist.back()[j];
            }
            double gamma = sy / yy;
            for (double& qj : q) qj *= gamma;
        }
        for (std::size_t i = 0; i < s_hist.size(); ++i) {
            double b = 0.0;
            for (std::size_t j = 0; j < q.size(); ++j) b += y_hist[i][j] * q[j];
            b *= rho_hist[i];
            for (std::size_t j = 0; j < q.size(); ++j) q[j] += s_hist[i][j] * (alpha[i] - b);
        }
        for (double& qj : q) qj = -qj;  // descent direction

        double dg = 0.0;
        for (std::size_t j = 0; j < q.size(); ++j) dg += q[j] * grad[j];
        if (dg >= 0) {  // fall back to steepest descent
            for (std::size_t j = 0; j < q.size(); ++j) q[j] = -grad[j];
            dg = 0.0;
            for (double g : grad) dg -= g * g;
        }

        double step = 1.0;
        std::vector<double> w_new(w.size());
        double f_new = f;
        bool accepted = false;
        for (int ls = 0; ls < 50; ++ls) {
            for (std::size_t j = 0; j < w.size(); ++j) w_new[j] = w[j] + step * q[j];
            f_new = prob.eval(w_new, grad_new);
            if (f_new <= f + 1e-4 * step * dg) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;

        std::vector<double> s(w.size()), yv(w.size());
        double sy = 0.0;
        for (std::size_t j = 0; j < w.size(); ++j) {
            s[j] = w_new[j] - w[j];
            yv[j] = grad_new[j] - grad[j];
            sy += s[j] * yv[j];
        }
        if (sy > 1e-12) {
            s_hist.push_back(std::move(s));
            y_hist.push_back(std::move(yv));
            rho_hist.push_back(1.0 / sy);
            if (s_hist.size() > m) {
                s_hist.pop_front();
                y_hist.pop_front();
                rho_hist.pop_front();
            }
        }
        w = w_new;
        f = f_new;
        grad = grad_new;
    }
    return iter;
}

double f1_score(const std::vector<double>& probs, const std::vector<char>& sexes) {
    double tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        bool pred_m = probs[i] >= 0.5, is_m = sexes[i] == 'M';
        if (pred_m && is_m) ++tp;
        else if (pred_m) ++fp;
        else if (is_m) ++fn;
    }
    if (tp == 0) return 0.0;
    double prec = tp / (tp + fp), rec = tp / (tp + fn);
    return 2.0 * prec * rec / (prec + rec);
}

double roc_auc(const std::vector<double>& probs, const std::vector<char>& sexes) {
    auto ranks = midranks(probs);
    double rpos = 0.0;
    std::size_t npos = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (sexes[i] == 'M') {
            rpos += ranks[i];
            ++npos;
        }
    }
    std::size_t nneg = probs.size() - npos;
    if (npos == 0 || nneg == 0) return 0.5;
    return (rpos - static_cast<double>(npos) * (static_cast<double>(npos) + 1.0) / 2.0) /
           (static_cast<double>(npos) * static_cast<double>(nneg));
}

}  // namespace

SparseVec NameModel::featurize(const std::string& name) const {
    auto counts = gram_counts(name);
    SparseVec v;
    double norm2 = 0.0;
    for (const auto& [gram, tf] : counts) {
        auto it = vocabulary_.find(gram);
        if (it == vocabulary_.end()) continue;  // out-of-vocabulary grams dropped
        double val = tf * idf_[it->second];
        v.items.emplace_back(it->second, val);
        norm2 += val * val;
    }
    if (norm2 > 0.0) {
        double inv = 1.0 / std::sqrt(norm2);
        for (auto& [col, val] : v.items) val = val * inv * log_odds_scale_[col];
    }
    return v;
}

double NameModel::predict(const std::string& name) const {
    std::string n = trim(name);
    if (n.empty()) throw std::invalid_argument("gender prediction refused: missing first name");
    if (name_abbreviated(n))
        throw std::invalid_argument("gender prediction refused: abbreviated first name '" + n + "'");
    SparseVec v = featurize(n);
    double z = bias_;
    for (const auto& [col, val] : v.items) z += weights_[col] * val;
    return sigmoid(z);
}

NameModel train(const std::vector<NameSample>& samples, const TrainOptions& opts) {
    std::set<char> classes;
    for (const auto& s : samples) classes.insert(s.sex);
    if (classes.size() < 2) throw PipelineError("gender training needs both classes present");
    for (const auto& s : samples)
        if (s.count <= 0) throw PipelineError("gender training: nonpositive count for " + s.name);

    auto fit = [&](const std::vector<const NameSample*>& rows_in) {
        NameModel model;
        // Vocabulary from document frequency over name rows.
        std::map<std::string, std::size_t> df;
        for (const auto* s : rows_in)
            for (const auto& [gram, tf] : gram_counts(s->name)) df[gram] += 1;
        for (const auto& [gram, d] : df) {
            if (d >= opts.min_df) {
                std::size_t idx = model.vocabulary_.size();
                model.vocabulary_[gram] = idx;
            }
        }
        std::size_t dim = model.vocabulary_.size();
        model.idf_.assign(dim, 0.0);
        double n_rows = static_cast<double>(rows_in.size());
        for (const auto& [gram, idx] : model.vocabulary_)
            model.idf_[idx] = std::log((1.0 + n_rows) / (1.0 + static_cast<double>(df[gram]))) + 1.0;

        // Per-feature log-odds with add-one smoothing, weighted by counts.
        std::vector<double> male_cnt(dim, 0.0), female_cnt(dim, 0.0);
        for (const auto* s : rows_in) {
            for (const auto& [gram, tf] : gram_counts(s->name)) {
                auto it = model.vocabulary_.find(gram);
                if (it == model.vocabulary_.end()) continue;
                (s->sex == 'M' ? male_cnt : female_cnt)[it->second] += s->count;
            }
        }
        model.log_odds_scale_.assign(dim, 1.0);
        if (opts.log_odds_scale) {
            for (std::size_t j = 0; j < dim; ++j)
                model.log_odds_scale_[j] = std::log((male_cnt[j] + 1.0) / (female_cnt[j] + 1.0));
        }

        Problem prob;
        prob.c = opts.c;
        prob.dim = dim;
        double w_male = 0.0, w_female = 0.0;
        for (const auto* s : rows_in) (s->sex == 'M' ? w_male : w_female) += s->count;
        double total = w_male + w_female;
        for (const auto* s : rows_in) {
            prob.rows.push_back(model.featurize(s->name));
            prob.y.push_back(s->sex == 'M' ? 1.0 : -1.0);
            double cw = 1.0;
            if (opts.class_balance) cw = total / (2.0 * (s->sex == 'M' ? w_male : w_female));
            prob.sw.push_back(s->count * cw);
        }
        std::vector<double> w(dim + 1, 0.0);
        model.report_.iterations = lbfgs_minimize(prob, w, opts.max_iter, opts.tol);
        model.weights_.assign(w.begin(), w.begin() + static_cast<long>(dim));
        model.bias_ = w[dim];
        return model;
    };

    if (opts.holdout) {
        std::vector<std::size_t> order(samples.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::mt19937 rng(opts.seed);
        std::shuffle(order.begin(), order.end(), rng);
        std::size_t n_train = samples.size() * 8 / 10;
        if (n_train == 0 || n_train == samples.size())
            throw PipelineError("holdout split needs more samples");
        std::vector<const NameSample*> train_rows, test_rows;
        for (std::size_t i = 0; i < order.size(); ++i)
            (i < n_train ? train_rows : test_rows).push_back(&samples[order[i]]);
        std::set<char> train_classes;
        for (const auto* s : train_rows) train_classes.insert(s->sex);
        if (train_classes.size() < 2) throw PipelineError("holdout split left a single class");

        NameModel holdout_model = fit(train_rows);
        std::vector<double> probs;
        std::vector<char> sexes;
        for (const auto* s : test_rows) {
            if (name_abbreviated(s->name)) continue;
            probs.push_back(holdout_model.predict(s->name));
            sexes.push_back(s->sex);
        }
        std::vector<const NameSample*> all_rows;
        for (const auto& s : samples) all_rows.push_back(&s);
        NameModel model = fit(all_rows);
        model.report_.f1 = f1_score(probs, sexes);
        model.report_.roc_auc = roc_auc(probs, sexes);
        return model;
    }
    std::vector<const NameSample*> all_rows;
    for (const auto& s : samples) all_rows.push_back(&s);
    return fit(all_rows);
}

std::string NameModel::serialize() const {
    nlohmann::ordered_json j;
    j["format"] = "scicert-name-model";
    j["version"] = 1;
    auto vocab = nlohmann::ordered_json::array();
    std::vector<std::string> grams(vocabulary_.size());
    for (const auto& [gram, idx] : vocabulary_) grams[idx] = gram;
    for (const auto& g : grams) vocab.push_back(g);
    j["vocabulary"] = vocab;
    j["idf"] = idf_;
    j["log_odds_scale"] = log_odds_scale_;
    j["weights"] = weights_;
    j["bias"] = bias_;
    return j.dump();
}

NameModel NameModel::deserialize(const std::string& json) {
    nlohmann::json j = nlohmann::json::parse(json);
    if (j.value("format", std::string()) != "scicert-name-model" || j.value("version", 0) != 1)
        throw PipelineError("unrecognized name-model file");
    NameModel m;
    std::size_t idx = 0;
    for (const auto& g : j.at("vocabulary")) m.vocabulary_[g.get<std::string>()] = idx++;
    m.idf_ = j.at("idf").get<std::vector<double>>();
    m.log_odds_scale_ = j.at("log_odds_scale").get<std::vector<double>>();
    m.weights_ = j.at("weights").get<std::vector<double>>();
    m.bias_ = j.at("bias").get<double>();
    if (m.idf_.size() != m.vocabulary_.size() || m.log_odds_scale_.size() != m.vocabulary_.size() ||
        m.weights_.size() != m.vocabulary_.size())
        throw PipelineError("name-model file: dimension mismatch");
    return m;
}

void NameModel::save(const std::string& path) const { write_file(path, serialize()); }

NameModel NameModel::load(const std::string& path) { return deserialize(read_file(path)); }

std::optional<GenderScore> paper_gender(const PaperRecord& paper, const NameModel& model,
                                        GenderBasis basis, int max_team_size) {
    if (paper.authors.empty()) return std::nullopt;
    if (static_cast<int>(paper.authors.size()) >= max_team_size) return std::nullopt;

    auto score_author = [&](const AuthorRef& a) -> std::optional<double> {
        if (!a.has_usable_name()) return std::nullopt;
        return model.predict(a.first_name);
    };

    GenderScore gs;
    gs.basis = basis;
    if (basis == GenderBasis::first_author || basis == GenderBasis::last_author) {
        const AuthorRef& a =
            basis == GenderBasis::first_author ? paper.authors.front() : paper.authors.back();
        auto v = score_author(a);
        if (!v) return std::nullopt;
        gs.value = *v;
        gs.n_scored = 1;
        return gs;
    }
    double sum = 0.0;
    int n = 0;
    for (const auto& a : paper.authors) {
        if (auto v = score_author(a)) {
            sum += *v;
            ++n;
        }
    }
    if (n == 0) return std::nullopt;
    gs.value = sum / n;
    gs.n_scored = n;
    return gs;
}

}  // namespace scicert
