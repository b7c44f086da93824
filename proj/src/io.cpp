#include "smectic/io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

namespace smectic {

using json = nlohmann::ordered_json;

namespace {

[[noreturn]] void bad_field(const std::string& field,
                            const std::string& detail) {
  throw ConfigError(field, detail);
}

double get_number(const json& j, const std::string& path) {
  if (!j.is_number()) bad_field(path, "expected a number");
  return j.get<double>();
}

long get_integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) bad_field(path, "expected an integer");
  return j.get<long>();
}

std::string get_string(const json& j, const std::string& path) {
  if (!j.is_string()) bad_field(path, "expected a string");
  return j.get<std::string>();
}

void reject_unknown(const json& obj, const std::string& scope,
                    std::initializer_list<const char*> known) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* k : known)
      if (it.key() == k) ok = true;
    if (!ok) bad_field(scope.empty() ? it.key() : scope + "." + it.key(),
                       "unknown key");
  }
}

void parse_model(const json& j, ModelParams& m) {
  if (!j.is_object()) bad_field("model", "expected an object");
  reject_unknown(j, "model",
                 {"K", "A", "B", "C", "a", "b", "c", "B0", "q", "s_plus",
                  "kappa1", "kappa2", "coupled"});
  if (j.contains("K")) m.K = get_number(j["K"], "model.K");
  if (j.contains("A")) m.A = get_number(j["A"], "model.A");
  if (j.contains("B")) m.B = get_number(j["B"], "model.B");
  if (j.contains("C")) m.C = get_number(j["C"], "model.C");
  if (j.contains("a")) m.a = get_number(j["a"], "model.a");
  if (j.contains("b")) m.b = get_number(j["b"], "model.b");
  if (j.contains("c")) m.c = get_number(j["c"], "model.c");
  if (j.contains("B0")) m.B0 = get_number(j["B0"], "model.B0");
  if (j.contains("q")) m.q = get_number(j["q"], "model.q");
  if (j.contains("s_plus")) m.s_plus = get_number(j["s_plus"], "model.s_plus");
  if (j.contains("kappa1"))
    m.kappa1 = get_number(j["kappa1"], "model.kappa1");
  if (j.contains("kappa2"))
    m.kappa2 = get_number(j["kappa2"], "model.kappa2");
  if (j.contains("coupled")) {
    if (!j["coupled"].is_boolean())
      bad_field("model.coupled", "expected a boolean");
    m.coupled = j["coupled"].get<bool>();
  }
}

const char* form_name(SchemeForm f) {
  return f == SchemeForm::etd ? "etd" : "implicit";
}

}  // namespace

long RunConfig::steps() const {
  if (!has_T) return n_steps;
  const double n_real = T / tau;
  const double n = std::round(n_real);
  if (n < 1 || std::abs(n * tau - T) > 1e-9 * T)
    bad_field("time.tau", "tau must divide T exactly");
  return static_cast<long>(n);
}

void RunConfig::validate() const {
  if (d != 2 && d != 3) bad_field("grid.d", "dimension must be 2 or 3");
  if (model.d != d) bad_field("grid.d", "model dimension out of sync");
  if (J < 2) bad_field("grid.J", "need at least two nodes per direction");
  if (!(L > 0)) bad_field("grid.L", "domain length must be positive");
  if (!(tau > 0)) bad_field("time.tau", "time step must be positive");
  if (has_T && !(T > 0)) bad_field("time.T", "final time must be positive");
  if (!has_T && n_steps < 0) bad_field("time.n_steps", "must be >= 0");
  if (has_T) steps();  // alignment check
  if (!(model.eta0 >= 0 && model.eta0 <= 1))
    bad_field("scheme.eta0", "must lie in [0, 1]");
  if (init.kind == InitKind::snapshot && init.snapshot_base.empty())
    bad_field("init.path", "snapshot restart requires a path");
  if (!(init.u_amplitude == init.u_amplitude))
    bad_field("init.u_amplitude", "must be a number");
  if (output.snapshot_every < 0)
    bad_field("output.snapshot_every", "must be >= 0");
  if (!(study.T > 0)) bad_field("study.T", "must be positive");
  if (study.taus.empty()) bad_field("study.taus", "must be nonempty");
  for (double t : study.taus)
    if (!(t > 0)) bad_field("study.taus", "entries must be positive");
  if (!(study.tau_bench > 0)) bad_field("study.tau_bench", "must be positive");
  try {
    model.validate();
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    const auto colon = msg.find(':');
    const std::string field =
        colon == std::string::npos ? std::string("model") : msg.substr(0, colon);
    const std::string detail =
        colon == std::string::npos ? msg : msg.substr(colon + 1);
    bad_field(field, detail.empty() ? "" : detail.substr(detail[0] == ' '));
  }
}

RunConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    bad_field("syntax", e.what());
  }
  if (!j.is_object()) bad_field("root", "expected a JSON object");
  reject_unknown(
      j, "",
      {"model", "grid", "time", "scheme", "init", "output", "study", "seed"});

  RunConfig cfg;
  if (j.contains("model")) parse_model(j["model"], cfg.model);

  if (j.contains("grid")) {
    const json& g = j["grid"];
    if (!g.is_object()) bad_field("grid", "expected an object");
    reject_unknown(g, "grid", {"d", "J", "L"});
    if (g.contains("d")) cfg.d = static_cast<int>(get_integer(g["d"], "grid.d"));
    if (g.contains("J")) cfg.J = get_integer(g["J"], "grid.J");
    if (g.contains("L")) cfg.L = get_number(g["L"], "grid.L");
  }
  cfg.model.d = cfg.d;  // the model dimension always follows the grid

  if (j.contains("time")) {
    const json& t = j["time"];
    if (!t.is_object()) bad_field("time", "expected an object");
    reject_unknown(t, "time", {"tau", "T", "n_steps"});
    if (t.contains("tau")) cfg.tau = get_number(t["tau"], "time.tau");
    if (t.contains("T") && t.contains("n_steps"))
      bad_field("time", "specify T or n_steps, not both");
    if (t.contains("T")) {
      cfg.has_T = true;
      cfg.T = get_number(t["T"], "time.T");
    } else if (t.contains("n_steps")) {
      cfg.has_T = false;
      cfg.n_steps = get_integer(t["n_steps"], "time.n_steps");
    }
  }

  if (j.contains("scheme")) {
    const json& s = j["scheme"];
    if (!s.is_object()) bad_field("scheme", "expected an object");
    reject_unknown(s, "scheme", {"form", "eta0"});
    if (s.contains("form")) {
      const std::string f = get_string(s["form"], "scheme.form");
      if (f == "etd")
        cfg.form = SchemeForm::etd;
      else if (f == "implicit")
        cfg.form = SchemeForm::implicit;
      else
        bad_field("scheme.form", "must be \"etd\" or \"implicit\"");
    }
    if (s.contains("eta0"))
      cfg.model.eta0 = get_number(s["eta0"], "scheme.eta0");
  }

  if (j.contains("init")) {
    const json& i = j["init"];
    if (!i.is_object()) bad_field("init", "expected an object");
    reject_unknown(i, "init", {"kind", "u_amplitude", "path"});
    if (i.contains("kind")) {
      const std::string k = get_string(i["kind"], "init.kind");
      if (k == "director_wave")
        cfg.init.kind = InitKind::director_wave;
      else if (k == "snapshot")
        cfg.init.kind = InitKind::snapshot;
      else
        bad_field("init.kind", "must be \"director_wave\" or \"snapshot\"");
    }
    if (i.contains("u_amplitude"))
      cfg.init.u_amplitude = get_number(i["u_amplitude"], "init.u_amplitude");
    if (i.contains("path"))
      cfg.init.snapshot_base = get_string(i["path"], "init.path");
  }

  if (j.contains("output")) {
    const json& o = j["output"];
    if (!o.is_object()) bad_field("output", "expected an object");
    reject_unknown(o, "output",
                   {"directory", "snapshot_every", "diagnostics"});
    if (o.contains("directory"))
      cfg.output.directory = get_string(o["directory"], "output.directory");
    if (o.contains("snapshot_every"))
      cfg.output.snapshot_every =
          get_integer(o["snapshot_every"], "output.snapshot_every");
    if (o.contains("diagnostics"))
      cfg.output.diagnostics = get_string(o["diagnostics"], "output.diagnostics");
  }

  if (j.contains("study")) {
    const json& s = j["study"];
    if (!s.is_object()) bad_field("study", "expected an object");
    reject_unknown(s, "study", {"T", "taus", "tau_bench"});
    if (s.contains("T")) cfg.study.T = get_number(s["T"], "study.T");
    if (s.contains("taus")) {
      if (!s["taus"].is_array() || s["taus"].empty())
        bad_field("study.taus", "expected a nonempty array");
      cfg.study.taus.clear();
      for (const json& v : s["taus"])
        cfg.study.taus.push_back(get_number(v, "study.taus"));
    }
    if (s.contains("tau_bench"))
      cfg.study.tau_bench = get_number(s["tau_bench"], "study.tau_bench");
  }

  if (j.contains("seed")) {
    if (!j["seed"].is_number_integer() || j["seed"].get<long long>() < 0)
      bad_field("seed", "expected a nonnegative integer");
    cfg.seed = j["seed"].get<std::uint64_t>();
  }

  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) bad_field("file", "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string effective_config_json(const RunConfig& cfg) {
  json j;
  j["model"] = {{"K", cfg.model.K},     {"A", cfg.model.A},
                {"B", cfg.model.B},     {"C", cfg.model.C},
                {"a", cfg.model.a},     {"b", cfg.model.b},
                {"c", cfg.model.c},     {"B0", cfg.model.B0},
                {"q", cfg.model.q},     {"s_plus", cfg.model.s_plus},
                {"kappa1", cfg.model.kappa1}, {"kappa2", cfg.model.kappa2},
                {"coupled", cfg.model.coupled}};
  j["grid"] = {{"d", cfg.d}, {"J", cfg.J}, {"L", cfg.L}};
  if (cfg.has_T)
    j["time"] = {{"tau", cfg.tau}, {"T", cfg.T}};
  else
    j["time"] = {{"tau", cfg.tau}, {"n_steps", cfg.n_steps}};
  j["scheme"] = {{"form", form_name(cfg.form)}, {"eta0", cfg.model.eta0}};
  if (cfg.init.kind == InitKind::director_wave)
    j["init"] = {{"kind", "director_wave"},
                 {"u_amplitude", cfg.init.u_amplitude}};
  else
    j["init"] = {{"kind", "snapshot"}, {"path", cfg.init.snapshot_base}};
  j["output"] = {{"directory", cfg.output.directory},
                 {"snapshot_every", cfg.output.snapshot_every},
                 {"diagnostics", cfg.output.diagnostics}};
  j["study"] = {{"T", cfg.study.T},
                {"taus", cfg.study.taus},
                {"tau_bench", cfg.study.tau_bench}};
  j["seed"] = cfg.seed;
  return j.dump(2) + "\n";
}

std::string resolve_output_dir(const OutputSpec& out) {
  const char* env = std::getenv("SMECTIC_OUTPUT_DIR");
  if (env && *env) return env;
  return out.directory;
}

int thread_budget() {
  const char* env = std::getenv("SMECTIC_THREADS");
  if (!env || !*env) return 1;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (end == env || *end != '\0' || v < 1) return 1;
  return static_cast<int>(v > 64 ? 64 : v);
}

SimState initial_state(const RunConfig& cfg) {
  cfg.validate();
  if (cfg.init.kind == InitKind::snapshot) {
    SimState st = read_snapshot(cfg.init.snapshot_base);
    if (st.Q.grid().d != cfg.d || st.Q.grid().J != cfg.J)
      bad_field("init.path", "snapshot grid does not match config grid");
    return st;
  }

  const PeriodicGrid grid = cfg.grid();
  std::vector<ScalarField> n(static_cast<std::size_t>(cfg.d),
                             ScalarField(grid));
  ScalarField u(grid);
  const int J = grid.J;
  for (int ix = 0; ix < J; ++ix) {
    const double x = grid.coord(ix);
    for (int iy = 0; iy < J; ++iy) {
      const double y = grid.coord(iy);
      const double phase = x + y;
      if (cfg.d == 2) {
        const std::size_t i = grid.index(ix, iy);
        n[0][i] = std::cos(phase);
        n[1][i] = std::sin(phase);
        u[i] = cfg.init.u_amplitude * std::cos(cfg.model.q * x);
      } else {
        for (int iz = 0; iz < J; ++iz) {
          const std::size_t i = grid.index(ix, iy, iz);
          n[0][i] = std::cos(phase);
          n[1][i] = std::sin(phase);
          n[2][i] = 0.0;
          u[i] = cfg.init.u_amplitude * std::cos(cfg.model.q * x);
        }
      }
    }
  }

  SimState st;
  st.Q = q_from_director(grid, n);
  st.u = std::move(u);
  st.s = e1_discrete(st.Q, st.u, cfg.model);
  st.t = 0;
  st.step = 0;
  return st;
}

namespace {

std::vector<std::string> component_names(int d) {
  if (d == 2) return {"q11", "q12", "u"};
  return {"q11", "q12", "q13", "q22", "q23", "u"};
}

void write_le_f64(std::ofstream& out, const double* v, std::size_t count) {
  std::vector<unsigned char> buf(count * 8);
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint64_t bits = std::bit_cast<std::uint64_t>(v[i]);
    for (int b = 0; b < 8; ++b)
      buf[i * 8 + b] = static_cast<unsigned char>((bits >> (8 * b)) & 0xFF);
  }
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size()));
}

void read_le_f64(std::ifstream& in, double* v, std::size_t count,
                 const std::string& path) {
  std::vector<unsigned char> buf(count * 8);
  in.read(reinterpret_cast<char*>(buf.data()),
          static_cast<std::streamsize>(buf.size()));
  if (static_cast<std::size_t>(in.gcount()) != buf.size())
    throw std::runtime_error("snapshot: short read in " + path);
  for (std::size_t i = 0; i < count; ++i) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b)
      bits |= static_cast<std::uint64_t>(buf[i * 8 + b]) << (8 * b);
    v[i] = std::bit_cast<double>(bits);
  }
}

}  // namespace

void write_snapshot(const std::string& base, const SimState& state) {
  require_same_grid(state.Q.grid(), state.u.grid());
  const PeriodicGrid& g = state.Q.grid();
  const std::vector<std::string> names = component_names(g.d);

  json header;
  header["d"] = g.d;
  header["J"] = g.J;
  header["L"] = g.L;
  header["time"] = state.t;
  header["step"] = state.step;
  header["s"] = state.s;
  header["components"] = names;
  {
    std::ofstream out(base + ".json", std::ios::binary);
    if (!out) throw std::runtime_error("snapshot: cannot write " + base + ".json");
    out << header.dump(2) << "\n";
  }

  for (std::size_t c = 0; c < names.size(); ++c) {
    const std::string path = base + "." + names[c] + ".f64";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("snapshot: cannot write " + path);
    const ScalarField& f = (names[c] == "u")
                               ? state.u
                               : state.Q.comp(static_cast<int>(c));
    write_le_f64(out, f.data(), f.size());
    if (!out) throw std::runtime_error("snapshot: write failed on " + path);
  }
}

SimState read_snapshot(const std::string& base) {
  std::ifstream in(base + ".json", std::ios::binary);
  if (!in)
    throw std::runtime_error("snapshot: cannot open " + base + ".json");
  json header;
  try {
    in >> header;
  } catch (const json::parse_error& e) {
    throw std::runtime_error("snapshot: bad header in " + base + ".json: " +
                             e.what());
  }
  for (const char* key : {"d", "J", "L", "time", "step", "s", "components"})
    if (!header.contains(key))
      throw std::runtime_error(std::string("snapshot: header missing ") + key);

  const int d = header["d"].get<int>();
  const long J = header["J"].get<long>();
  const double L = header["L"].get<double>();
  const PeriodicGrid grid(d, J, L);
  const std::vector<std::string> expect = component_names(d);
  const auto got = header["components"].get<std::vector<std::string>>();
  if (got != expect)
    throw std::runtime_error("snapshot: unexpected component list");

  SimState st;
  st.Q = QTensorField(grid);
  st.u = ScalarField(grid);
  st.t = header["time"].get<double>();
  st.step = header["step"].get<long>();
  st.s = header["s"].get<double>();

  for (std::size_t c = 0; c < expect.size(); ++c) {
    const std::string path = base + "." + expect[c] + ".f64";
    std::ifstream fin(path, std::ios::binary);
    if (!fin) throw std::runtime_error("snapshot: cannot open " + path);
    ScalarField& f =
        (expect[c] == "u") ? st.u : st.Q.comp(static_cast<int>(c));
    read_le_f64(fin, f.data(), f.size(), path);
    char extra;
    if (fin.read(&extra, 1).gcount() != 0)
      throw std::runtime_error("snapshot: trailing bytes in " + path);
  }
  return st;
}

struct DiagnosticsWriter::Impl {
  std::FILE* f = nullptr;
};

DiagnosticsWriter::DiagnosticsWriter(const std::string& path, double tau,
                                     std::uint64_t seed)
    : impl_(new Impl), tau_(tau) {
  impl_->f = std::fopen(path.c_str(), "wb");
  if (!impl_->f) {
    delete impl_;
    throw std::runtime_error("diagnostics: cannot write " + path);
  }
  std::fprintf(impl_->f, "# seed=%llu\n",
               static_cast<unsigned long long>(seed));
  std::fprintf(impl_->f,
               "step,t,tau,E0,E1h,s,s_tilde,xi,g,R,modified_energy,"
               "max_abs_Q_F,max_abs_u\n");
}

DiagnosticsWriter::~DiagnosticsWriter() {
  if (impl_->f) std::fclose(impl_->f);
  delete impl_;
}

void DiagnosticsWriter::write_row(const SimState& state,
                                  const StepReport& rep) {
  const double e0 = rep.energy_after - state.s;
  std::fprintf(impl_->f,
               "%ld,%.16e,%.16e,%.16e,%.16e,%.16e,%.16e,%.16e,%.16e,%.16e,"
               "%.16e,%.16e,%.16e\n",
               state.step, state.t, tau_, e0, rep.e1h_after, state.s,
               rep.s_tilde, rep.xi, rep.g, rep.R, rep.energy_after, rep.mbp,
               rep.max_abs_u);
}

void DiagnosticsWriter::flush() {
  if (impl_->f) std::fflush(impl_->f);
}

ScalarField random_scalar(const PeriodicGrid& g, std::mt19937_64& rng,
                          double amp) {
  std::uniform_real_distribution<double> dist(-amp, amp);
  ScalarField f(g);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = dist(rng);
  return f;
}

QTensorField random_q(const PeriodicGrid& g, std::mt19937_64& rng,
                      double amp) {
  std::uniform_real_distribution<double> dist(-amp, amp);
  QTensorField Q(g);
  for (int c = 0; c < Q.components(); ++c)
    for (std::size_t i = 0; i < Q.comp(c).size(); ++i)
      Q.comp(c)[i] = dist(rng);
  return Q;
}

}  // namespace smectic
