#include "lagcarma/model_file.hpp"

#include "lagcarma/errors.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <vector>

namespace lagcarma {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_number(const std::string& raw, long line, const std::string& key) {
  const std::string s = trim(raw);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw DataError("line " + std::to_string(line) + ": key '" + key + "' expects a number, got '" + s + "'", line);
  }
  return v;
}

std::vector<double> to_list(std::string raw, long line, const std::string& key) {
  raw = trim(raw);
  if (!raw.empty() && raw.front() == '[') {
    if (raw.back() != ']') throw DataError("line " + std::to_string(line) + ": unbalanced '['", line);
    raw = raw.substr(1, raw.size() - 2);
  }
  std::vector<double> out;
  std::stringstream ss(raw);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_number(item, line, key));
  if (out.empty()) throw DataError("line " + std::to_string(line) + ": key '" + key + "' is empty", line);
  return out;
}

struct Entry {
  std::string value;
  long line;
};

}  // namespace

ModelFile parse_model(const std::string& text) {
  std::map<std::string, Entry> kv;
  std::stringstream in(text);
  std::string row;
  long line = 0;
  while (std::getline(in, row)) {
    ++line;
    const auto hash = row.find('#');
    if (hash != std::string::npos) row.resize(hash);
    row = trim(row);
    if (row.empty()) continue;
    const auto eq = row.find('=');
    if (eq == std::string::npos) throw DataError("line " + std::to_string(line) + ": expected key = value", line);
    const std::string key = trim(row.substr(0, eq));
    if (kv.count(key)) throw DataError("line " + std::to_string(line) + ": duplicate key '" + key + "'", line);
    kv[key] = {trim(row.substr(eq + 1)), line};
  }
  auto need = [&](const std::string& key) -> const Entry& {
    const auto it = kv.find(key);
    if (it == kv.end()) throw DataError("model file: missing key '" + key + "'", 0);
    return it->second;
  };
  auto number = [&](const std::string& key) {
    const auto& e = need(key);
    return to_number(e.value, e.line, key);
  };
  auto number_or = [&](const std::string& key, double fallback) {
    return kv.count(key) ? number(key) : fallback;
  };

  const auto a = to_list(need("a").value, need("a").line, "a");
  const auto b = to_list(need("b").value, need("b").line, "b");
  if (kv.count("p") && static_cast<std::size_t>(number("p")) != a.size()) {
    throw DataError("line " + std::to_string(need("p").line) + ": p does not match the length of a", need("p").line);
  }
  if (kv.count("q") && static_cast<std::size_t>(number("q")) + 1 != b.size()) {
    throw DataError("line " + std::to_string(need("q").line) + ": q does not match the length of b", need("q").line);
  }

  const auto& fam = need("law.family");
  LawFamily family;
  try {
    family = parse_law_family(fam.value);
  } catch (const std::exception& ex) {
    throw DataError("line " + std::to_string(fam.line) + ": " + ex.what(), fam.line);
  }
  std::optional<MixingLaw> law;
  try {
    switch (family) {
      case LawFamily::gamma:
        law = MixingLaw::gamma(number("law.shape"), number("law.rate"));
        break;
      case LawFamily::inverse_gaussian:
        law = MixingLaw::inverse_gaussian(number("law.a"), number("law.b"));
        break;
      case LawFamily::gig:
        law = MixingLaw::gig(number("law.a"), number("law.b"), number("law.p"));
        break;
      case LawFamily::degenerate:
        law = MixingLaw::degenerate(number("law.value"));
        break;
    }
  } catch (const DataError&) {
    throw;
  } catch (const std::exception& ex) {
    throw DataError(std::string("model file: invalid law: ") + ex.what(), fam.line);
  }

  std::optional<CarmaSpec> spec;
  try {
    spec.emplace(a, b);
  } catch (const std::exception& ex) {
    throw DataError(std::string("model file: invalid CARMA coefficients: ") + ex.what(), need("a").line);
  }
  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(spec->p());
  if (kv.count("x0")) {
    const auto v = to_list(need("x0").value, need("x0").line, "x0");
    if (static_cast<int>(v.size()) != spec->p()) {
      throw DataError("line " + std::to_string(need("x0").line) + ": x0 must have p entries", need("x0").line);
    }
    for (int i = 0; i < spec->p(); ++i) x0(i) = v[static_cast<std::size_t>(i)];
  }
  ModelFile out{*spec, *law, x0, number_or("spot", 1.0), number_or("rate", 0.0), number_or("t0", 0.0)};
  if (!(out.spot > 0.0)) throw DataError("model file: spot must be positive", kv.count("spot") ? need("spot").line : 0);
  for (const auto& [key, e] : kv) {
    static const char* known[] = {"p", "q", "a", "b", "x0", "spot", "rate", "t0", "law.family",
                                  "law.shape", "law.rate", "law.a", "law.b", "law.p", "law.value"};
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw DataError("line " + std::to_string(e.line) + ": unknown key '" + key + "'", e.line);
  }
  return out;
}

ModelFile load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open model file " + path.string(), 0);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str());
}

std::string format_model(const ModelFile& model) {
  std::ostringstream os;
  os.precision(17);
  auto list = [&os](auto values) {
    for (std::size_t i = 0; i < values.size(); ++i) os << (i ? ", " : "") << values[i];
  };
  os << "p = " << model.spec.p() << "\nq = " << model.spec.q() << "\na = ";
  list(model.spec.ar_coeffs());
  os << "\nb = ";
  list(model.spec.ma_coeffs());
  os << "\nlaw.family = " << to_string(model.law.family()) << '\n';
  std::visit(
      [&os](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, GammaLaw>) {
          os << "law.shape = " << p.shape << "\nlaw.rate = " << p.rate << '\n';
        } else if constexpr (std::is_same_v<T, InverseGaussianLaw>) {
          os << "law.a = " << p.a << "\nlaw.b = " << p.b << '\n';
        } else if constexpr (std::is_same_v<T, GigLaw>) {
          os << "law.a = " << p.a << "\nlaw.b = " << p.b << "\nlaw.p = " << p.p << '\n';
        } else {
          os << "law.value = " << p.value << '\n';
        }
      },
      model.law.params());
  os << "x0 = ";
  std::vector<double> x(model.x0.data(), model.x0.data() + model.x0.size());
  list(x);
  os << "\nspot = " << model.spot << "\nrate = " << model.rate << "\nt0 = " << model.t0 << '\n';
  return os.str();
}

}  // namespace lagcarma
