#include "xaieval/data/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>

#include "xaieval/core/error.hpp"
#include "xaieval/core/random.hpp"
#include "xaieval/nn/network.hpp"

namespace xaieval::data {

const char* to_string(SyntheticRule rule) {
  switch (rule) {
    case SyntheticRule::Threshold: return "threshold";
    case SyntheticRule::Linear: return "linear";
    case SyntheticRule::Xor: return "xor";
  }
  return "?";
}

SyntheticRule synthetic_rule_from_string(const std::string& name) {
  if (name == "threshold") return SyntheticRule::Threshold;
  if (name == "linear") return SyntheticRule::Linear;
  if (name == "xor") return SyntheticRule::Xor;
  throw InvalidArgument("unknown synthetic rule '" + name + "' (expected threshold, linear or xor)");
}

void SyntheticSpec::validate() const {
  if (n == 0) throw InvalidArgument("synthetic spec: n must be positive");
  if (d == 0) throw InvalidArgument("synthetic spec: d must be positive");
  if (num_classes < 2) throw InvalidArgument("synthetic spec: need at least 2 classes");
  if (!(label_noise >= 0.0 && label_noise <= 1.0))
    throw InvalidArgument("synthetic spec: label_noise must lie in [0,1]");
  switch (rule) {
    case SyntheticRule::Threshold:
      if (num_classes != 2) throw InvalidArgument("synthetic spec: threshold rule is binary");
      if (feature >= d) throw InvalidArgument("synthetic spec: threshold feature out of range");
      break;
    case SyntheticRule::Linear:
      if (weights.size() != d)
        throw InvalidArgument("synthetic spec: linear rule needs one weight per feature");
      if (std::all_of(weights.begin(), weights.end(), [](double w) { return w == 0.0; }))
        throw InvalidArgument("synthetic spec: linear rule needs a nonzero weight");
      break;
    case SyntheticRule::Xor:
      if (num_classes != 2 || d < 2)
        throw InvalidArgument("synthetic spec: xor rule needs 2 classes and d >= 2");
      break;
  }
}

std::vector<std::size_t> SyntheticSpec::informative_features() const {
  switch (rule) {
    case SyntheticRule::Threshold: return {feature};
    case SyntheticRule::Xor: return {0, 1};
    case SyntheticRule::Linear: {
      std::vector<std::size_t> out;
      for (std::size_t i = 0; i < weights.size(); ++i)
        if (weights[i] != 0.0) out.push_back(i);
      return out;
    }
  }
  return {};
}

nlohmann::json SyntheticSpec::to_json() const {
  nlohmann::json j = {{"n", n},
                      {"d", d},
                      {"num_classes", num_classes},
                      {"rule", to_string(rule)},
                      {"label_noise", label_noise}};
  if (rule == SyntheticRule::Threshold) {
    j["feature"] = feature;
    j["threshold"] = threshold;
  }
  if (rule == SyntheticRule::Linear) j["weights"] = weights;
  j["informative_features"] = informative_features();
  return j;
}

SyntheticSpec SyntheticSpec::from_json(const nlohmann::json& j) {
  SyntheticSpec s;
  s.n = j.value("n", s.n);
  s.d = j.value("d", s.d);
  s.num_classes = j.value("num_classes", s.num_classes);
  s.rule = synthetic_rule_from_string(j.value("rule", std::string("threshold")));
  s.feature = j.value("feature", s.feature);
  s.threshold = j.value("threshold", s.threshold);
  s.weights = j.value("weights", std::vector<double>{});
  s.label_noise = j.value("label_noise", s.label_noise);
  s.validate();
  return s;
}

Dataset synthesize(const SyntheticSpec& spec, std::uint64_t seed) {
  spec.validate();
  Rng rng(seed);
  Dataset ds;
  ds.feature_names = nn::default_feature_names(spec.d);
  for (std::size_t k = 0; k < spec.num_classes; ++k) ds.class_names.push_back("class" + std::to_string(k));
  ds.features.resize(spec.n * spec.d);
  for (double& v : ds.features) v = uniform01(rng);
  ds.labels.resize(spec.n);

  switch (spec.rule) {
    case SyntheticRule::Threshold:
      for (std::size_t r = 0; r < spec.n; ++r)
        ds.labels[r] = ds.at(r, spec.feature) > spec.threshold ? 1 : 0;
      break;
    case SyntheticRule::Xor:
      for (std::size_t r = 0; r < spec.n; ++r)
        ds.labels[r] = (ds.at(r, 0) > 0.5) != (ds.at(r, 1) > 0.5) ? 1 : 0;
      break;
    case SyntheticRule::Linear: {
      std::vector<double> score(spec.n, 0.0);
      for (std::size_t r = 0; r < spec.n; ++r)
        for (std::size_t c = 0; c < spec.d; ++c) score[r] += spec.weights[c] * ds.at(r, c);
      std::vector<double> sorted = score;
      std::sort(sorted.begin(), sorted.end());
      std::vector<double> cuts;
      for (std::size_t k = 1; k < spec.num_classes; ++k)
        cuts.push_back(sorted[k * spec.n / spec.num_classes]);
      for (std::size_t r = 0; r < spec.n; ++r)
        ds.labels[r] = static_cast<std::size_t>(
            std::upper_bound(cuts.begin(), cuts.end(), score[r]) - cuts.begin());
      break;
    }
  }
  if (spec.label_noise > 0.0) {
    Rng noise(derive_seed(seed, 1));
    for (std::size_t r = 0; r < spec.n; ++r)
      if (uniform01(noise) < spec.label_noise)
        ds.labels[r] = static_cast<std::size_t>(uniform_index(noise, spec.num_classes));
  }
  ds.normalization.assign(spec.d, {0.0, 1.0});
  ds.validate();
  return ds;
}

// ---------------------------------------------------------------------------
// NSL-KDD-shaped surrogate

const std::vector<std::string>& nslkdd_feature_columns() {
  static const std::vector<std::string> names = {
      "duration", "protocol_type", "service", "flag", "src_bytes", "dst_bytes", "land",
      "wrong_fragment", "urgent", "hot", "num_failed_logins", "logged_in", "num_compromised",
      "root_shell", "su_attempted", "num_root", "num_file_creations", "num_shells",
      "num_access_files", "num_outbound_cmds", "is_host_login", "is_guest_login", "count",
      "srv_count", "serror_rate", "srv_serror_rate", "rerror_rate", "srv_rerror_rate",
      "same_srv_rate", "diff_srv_rate", "srv_diff_host_rate", "dst_host_count",
      "dst_host_srv_count", "dst_host_same_srv_rate", "dst_host_diff_srv_rate",
      "dst_host_same_src_port_rate", "dst_host_srv_diff_host_rate", "dst_host_serror_rate",
      "dst_host_srv_serror_rate", "dst_host_rerror_rate", "dst_host_srv_rerror_rate"};
  return names;
}

DatasetSchema nslkdd_schema(bool headerless) {
  DatasetSchema s;
  s.label_column = "label";
  s.categorical_columns = {"protocol_type", "service", "flag"};
  s.drop_columns = {"difficulty"};
  s.class_names = {"Normal", "DoS", "Probe", "R2L", "U2R"};
  const std::vector<std::pair<std::size_t, std::vector<std::string>>> groups = {
      {0, {"normal"}},
      {1, {"back", "land", "neptune", "pod", "smurf", "teardrop", "apache2", "mailbomb",
           "processtable", "udpstorm"}},
      {2, {"ipsweep", "nmap", "portsweep", "satan", "mscan", "saint"}},
      {3, {"ftp_write", "guess_passwd", "imap", "multihop", "phf", "spy", "warezclient",
           "warezmaster", "named", "sendmail", "snmpgetattack", "snmpguess", "worm", "xlock",
           "xsnoop"}},
      {4, {"buffer_overflow", "loadmodule", "perl", "rootkit", "httptunnel", "ps", "sqlattack",
           "xterm"}}};
  for (const auto& [index, names] : groups)
    for (const auto& name : names) s.label_mapping[name] = index;
  if (headerless) {
    s.column_names = nslkdd_feature_columns();
    s.column_names.push_back("label");
    s.column_names.push_back("difficulty");
  }
  return s;
}

namespace {

struct FlowRow {
  std::vector<std::string> cells;
};

double jitter(Rng& rng, double center, double spread) {
  return std::clamp(center + spread * (2.0 * uniform01(rng) - 1.0), 0.0, 1.0);
}

template <typename T>
const T& pick(Rng& rng, const std::vector<T>& options) {
  return options[static_cast<std::size_t>(uniform_index(rng, options.size()))];
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

void write_nslkdd_like_csv(const std::filesystem::path& path, std::size_t rows, std::uint64_t seed) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  const auto& columns = nslkdd_feature_columns();
  for (const auto& c : columns) out << c << ',';
  out << "label,difficulty\n";

  // Class mix skews towards Normal and DoS like KDDTrain+, with the rare
  // classes inflated so each has enough rows for per-class metrics.
  const double mix[5] = {0.50, 0.30, 0.12, 0.06, 0.02};
  const std::vector<std::vector<std::string>> attack_names = {
      {"normal"},
      {"neptune", "smurf", "back", "teardrop"},
      {"satan", "ipsweep", "portsweep", "nmap"},
      {"guess_passwd", "warezclient", "ftp_write", "imap"},
      {"buffer_overflow", "rootkit", "loadmodule", "perl"}};
  Rng rng(seed);
  for (std::size_t r = 0; r < rows; ++r) {
    double u = uniform01(rng);
    std::size_t cls = 0;
    while (cls < 4 && u >= mix[cls]) u -= mix[cls++];
    std::map<std::string, std::string> v;
    for (const auto& c : columns) v[c] = "0";
    auto set = [&](const std::string& k, double x) { v[k] = fmt(x); };
    auto seti = [&](const std::string& k, long x) { v[k] = std::to_string(x); };
    // Overlapping background noise shared by every class.
    seti("count", static_cast<long>(uniform_index(rng, 40)));
    seti("srv_count", static_cast<long>(uniform_index(rng, 40)));
    seti("dst_host_count", static_cast<long>(uniform_index(rng, 256)));
    seti("dst_host_srv_count", static_cast<long>(uniform_index(rng, 256)));
    set("dst_host_same_src_port_rate", uniform01(rng));
    set("srv_diff_host_rate", 0.3 * uniform01(rng));
    v["protocol_type"] = pick(rng, std::vector<std::string>{"tcp", "tcp", "udp", "icmp"});
    switch (cls) {
      case 0:  // normal
        v["service"] = pick(rng, std::vector<std::string>{"http", "smtp", "ftp_data", "domain_u", "private"});
        v["flag"] = uniform01(rng) < 0.9 ? "SF" : "REJ";
        seti("src_bytes", 100 + static_cast<long>(uniform_index(rng, 5000)));
        seti("dst_bytes", static_cast<long>(uniform_index(rng, 20000)));
        seti("logged_in", uniform01(rng) < 0.7 ? 1 : 0);
        set("same_srv_rate", jitter(rng, 0.9, 0.2));
        set("dst_host_same_srv_rate", jitter(rng, 0.7, 0.3));
        set("serror_rate", jitter(rng, 0.02, 0.05));
        set("rerror_rate", jitter(rng, 0.05, 0.1));
        break;
      case 1:  // DoS
        v["service"] = pick(rng, std::vector<std::string>{"private", "http", "ecr_i", "private"});
        v["flag"] = uniform01(rng) < 0.75 ? "S0" : "SF";
        seti("count", 100 + static_cast<long>(uniform_index(rng, 400)));
        seti("src_bytes", static_cast<long>(uniform_index(rng, 1500)));
        set("serror_rate", jitter(rng, 0.85, 0.2));
        set("srv_serror_rate", jitter(rng, 0.85, 0.2));
        set("dst_host_serror_rate", jitter(rng, 0.85, 0.2));
        set("dst_host_srv_serror_rate", jitter(rng, 0.8, 0.2));
        set("same_srv_rate", jitter(rng, 0.1, 0.1));
        set("diff_srv_rate", jitter(rng, 0.07, 0.05));
        break;
      case 2:  // Probe
        v["service"] = pick(rng, std::vector<std::string>{"private", "eco_i", "other", "ftp_data", "telnet"});
        v["flag"] = pick(rng, std::vector<std::string>{"REJ", "RSTO", "SF", "SH"});
        set("rerror_rate", jitter(rng, 0.6, 0.4));
        set("srv_rerror_rate", jitter(rng, 0.6, 0.4));
        set("diff_srv_rate", jitter(rng, 0.6, 0.4));
        set("dst_host_diff_srv_rate", jitter(rng, 0.6, 0.4));
        set("dst_host_rerror_rate", jitter(rng, 0.5, 0.4));
        set("same_srv_rate", jitter(rng, 0.3, 0.3));
        seti("src_bytes", static_cast<long>(uniform_index(rng, 50)));
        break;
      case 3:  // R2L
        v["service"] = pick(rng, std::vector<std::string>{"ftp", "telnet", "imap4", "ftp_data"});
        v["flag"] = uniform01(rng) < 0.7 ? "SF" : "RSTO";
        seti("duration", static_cast<long>(uniform_index(rng, 3000)));
        seti("num_failed_logins", uniform01(rng) < 0.5 ? 1 + static_cast<long>(uniform_index(rng, 4)) : 0);
        seti("hot", static_cast<long>(uniform_index(rng, 20)));
        seti("is_guest_login", uniform01(rng) < 0.4 ? 1 : 0);
        seti("src_bytes", static_cast<long>(uniform_index(rng, 300000)));
        set("same_srv_rate", jitter(rng, 0.9, 0.2));
        set("dst_host_same_srv_rate", jitter(rng, 0.4, 0.4));
        break;
      default:  // U2R
        v["service"] = pick(rng, std::vector<std::string>{"telnet", "ftp_data", "ftp"});
        v["flag"] = "SF";
        seti("duration", static_cast<long>(uniform_index(rng, 5000)));
        seti("root_shell", uniform01(rng) < 0.6 ? 1 : 0);
        seti("num_file_creations", static_cast<long>(uniform_index(rng, 10)));
        seti("num_shells", uniform01(rng) < 0.3 ? 1 : 0);
        seti("hot", 5 + static_cast<long>(uniform_index(rng, 25)));
        seti("logged_in", 1);
        seti("src_bytes", static_cast<long>(uniform_index(rng, 8000)));
        set("same_srv_rate", jitter(rng, 0.9, 0.2));
        break;
    }
    for (const auto& c : columns) out << v[c] << ',';
    out << pick(rng, attack_names[cls]) << ',' << uniform_index(rng, 22) << '\n';
  }
  if (!out) throw DataError("write failed for " + path.string());
}

// ---------------------------------------------------------------------------
// Robustness columns

double pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty()) throw ShapeError("pearson needs equal non-empty inputs");
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

RobustnessDatasets inject_robustness_columns(const Dataset& ds, const std::string& biased_feature,
                                             std::uint64_t seed, const RobustnessColumns& opts) {
  const auto index = ds.feature_index(biased_feature);
  if (!index) throw InvalidArgument("biased feature '" + biased_feature + "' is not in the dataset");
  if (ds.rows() == 0) throw InvalidArgument("robustness datasets need at least one row");
  if (ds.feature_index(opts.unrelated_name))
    throw InvalidArgument("dataset already has a column named '" + opts.unrelated_name + "'");

  std::vector<double> column(ds.rows());
  for (std::size_t r = 0; r < ds.rows(); ++r) column[r] = ds.at(r, *index);
  const auto [lo, hi] = std::minmax_element(column.begin(), column.end());
  if (!(*hi > *lo))
    throw InvalidArgument("biased feature '" + biased_feature + "' is constant and cannot carry labels");
  const double threshold = 0.5 * (*lo + *hi);

  RobustnessDatasets out;
  out.threshold = threshold;
  out.biased_index = *index;
  out.biased = ds;
  out.biased.class_names = {"low_" + biased_feature, "high_" + biased_feature};
  for (std::size_t r = 0; r < ds.rows(); ++r) out.biased.labels[r] = column[r] > threshold ? 1 : 0;

  Dataset& adv = out.adversarial;
  adv.feature_names = ds.feature_names;
  adv.feature_names.push_back(opts.unrelated_name);
  adv.class_names = out.biased.class_names;
  adv.labels = out.biased.labels;
  if (!ds.normalization.empty()) {
    adv.normalization = ds.normalization;
    adv.normalization.push_back({0.0, 1.0});
  }
  Rng rng(seed);
  adv.features.reserve(ds.rows() * (ds.cols() + 1));
  for (std::size_t r = 0; r < ds.rows(); ++r) {
    const auto row = ds.row(r);
    adv.features.insert(adv.features.end(), row.begin(), row.end());
    adv.features.push_back(opts.mode == UnrelatedColumn::Random ? uniform01(rng) : opts.constant_value);
  }
  out.unrelated_index = ds.cols();
  out.biased.validate();
  adv.validate();
  return out;
}

}  // namespace xaieval::data
