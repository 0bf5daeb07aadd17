#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scicert/corpus.hpp"

namespace scicert {

struct NameSample {
    std::string name;
    char sex = 'M';      // 'M' or 'F'
    double count = 1.0;  // popularity, used as a sample weight
};

// CSV name,sex,count (SSA "national" layout, header optional).
std::vector<NameSample> load_name_samples(const std::string& path);

struct SparseVec {
    std::vector<std::pair<std::size_t, double>> items;  // (column, value), sorted
};

struct TrainOptions {
    double c = 2.0;            // inverse regularization strength
    bool class_balance = true; // class-scaled sample weights
    bool log_odds_scale = true;
    std::size_t min_df = 2;    // vocabulary document-frequency floor
    int max_iter = 500;
    double tol = 1e-8;
    bool holdout = false;      // 80/20 split with held-out F1 / ROC-AUC
    unsigned seed = 7;         // split shuffling only; training is deterministic
};

struct TrainReport {
    std::optional<double> f1;       // present when holdout requested
    std::optional<double> roc_auc;
    int iterations = 0;
};

class NameModel {
  public:
    // Char n-grams for n=1..9 over "^name$"; tf-idf, L2-normalized, then
    // per-feature log-odds scaling.
    SparseVec featurize(const std::string& name) const;

    // Probability of 'M'; abbreviated or empty names are refused.
    double predict(const std::string& name) const;

    std::string serialize() const;  // versioned JSON
    static NameModel deserialize(const std::string& json);
    void save(const std::string& path) const;
    static NameModel load(const std::string& path);

    const TrainReport& report() const { return report_; }
    double bias() const { return bias_; }

    friend NameModel train(const std::vector<NameSample>& samples, const TrainOptions& opts);

  private:
    std::map<std::string, std::size_t> vocabulary_;
    std::vector<double> idf_;
    std::vector<double> log_odds_scale_;
    std::vector<double> weights_;
    double bias_ = 0.0;
    TrainReport report_;
};

NameModel train(const std::vector<NameSample>& samples, const TrainOptions& opts = {});

enum class GenderBasis { first_author, last_author, all_authors_mean };

struct GenderScore {
    double value = 0.5;  // probability male
    GenderBasis basis = GenderBasis::first_author;
    int n_scored = 0;
};

// Papers with >= max_team_size authors, or whose basis-relevant authors have
// no scorable name, are excluded (nullopt).
std::optional<GenderScore> paper_gender(const PaperRecord& paper, const NameModel& model,
                                        GenderBasis basis, int max_team_size = 10);

bool name_abbreviated(const std::string& name);

}  // namespace scicert
