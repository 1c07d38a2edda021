#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "slicecount/depth_reduction.hpp"
#include "slicecount/engine.hpp"
#include "slicecount/generators.hpp"
#include "slicecount/grammar.hpp"
#include "slicecount/harness.hpp"
#include "slicecount/nnf.hpp"
#include "slicecount/oracle.hpp"
#include "slicecount/program.hpp"
#include "slicecount/report.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace slicecount;

namespace {

enum Exit : int { kOk = 0, kInvalid = 1, kParse = 2, kParams = 3, kShape = 4, kRefusal = 5 };

struct InputMissing : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Config {
  std::string input;
  std::string kind = "auto";
  std::size_t n = 0;
  double epsilon = 0.5;
  double delta = 0.25;
  std::uint64_t seed = 1;
  unsigned jobs = 1;
  bool paperStrict = false;
  Overrides ov;
  bool json = false;
  bool diagnostics = false;
  std::uint64_t trials = 100;
  std::string outDir = ".";
};

std::string readFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputMissing("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string inputKind(const Config& c) {
  if (c.kind != "auto") return c.kind;
  const std::string ext = fs::path(c.input).extension().string();
  if (ext == ".pt") return "program";
  if (ext == ".nnf") return "nnf";
  if (ext == ".cfg" || ext == ".g" || ext == ".txt") return "cfg";
  throw std::invalid_argument("cannot infer input kind from '" + ext + "'; pass --kind");
}

Mode modeOf(const Config& c) {
  if (c.paperStrict)
    std::cerr << "warning: paper-strict parameters are astronomically large for desk inputs\n";
  return c.paperStrict ? Mode::PaperStrict : Mode::Practical;
}

RunOptions runOptions(const Config& c) {
  RunOptions o;
  o.jobs = c.jobs;
  o.diagnostics = c.diagnostics;
  return o;
}

void emit(const Config& c, const ordered_json& j) {
  if (c.json)
    std::cout << j.dump(2) << "\n";
  else
    std::cout << toText(j);
}

void addRandomized(CLI::App* sub, Config& c) {
  sub->add_option("--epsilon", c.epsilon, "relative error")->capture_default_str();
  sub->add_option("--delta", c.delta, "failure probability")->capture_default_str();
  sub->add_option("--seed", c.seed, "random seed")->capture_default_str();
  sub->add_option("--jobs", c.jobs, "worker threads (results do not depend on it)")->capture_default_str();
  sub->add_flag("--paper-strict", c.paperStrict, "use the theoretical parameters");
  sub->add_option("--override-ns", c.ov.ns, "samples per batch");
  sub->add_option("--override-nt", c.ov.nt, "number of batches");
  sub->add_option("--override-theta", c.ov.theta, "sample-set abort size");
  sub->add_option("--override-threshold", c.ov.threshold, "effective-height support threshold");
  sub->add_option("--override-m", c.ov.m, "independent runs");
  sub->add_flag("--diagnostics", c.diagnostics, "per-node diagnostics of the first run");
}

Program loadProgram(const std::string& path) {
  Program p = Program::parse(readFile(path));
  ValidationReport v = validateProgram(p);
  if (!v.ok()) throw CircuitShapeError("invalid program:\n" + v.toString());
  return p;
}

int cmdCountCfg(const Config& c) {
  Grammar g = parseGrammar(readFile(c.input));
  CfgCountResult r = countCfg(g, c.n, c.epsilon, c.delta, modeOf(c), c.ov, c.seed, runOptions(c));
  ordered_json j = toJson(r.count, c.diagnostics);
  j["n"] = c.n;
  j["empty_language"] = r.emptyLanguage;
  emit(c, j);
  return kOk;
}

int cmdCountDnnf(const Config& c) {
  NnfCircuit circ = parseNnf(readFile(c.input));
  NnfReport dec = checkDecomposable(circ);
  if (!dec.empty()) {
    std::ostringstream os;
    os << "circuit is not decomposable:";
    for (const auto& v : dec) os << "\n  node " << v.node << ": " << v.message;
    throw CircuitShapeError(os.str());
  }
  DnnfCountResult r = countDnnf(circ, c.epsilon, c.delta, modeOf(c), c.ov, c.seed, runOptions(c));
  ordered_json j = toJson(r.count, c.diagnostics);
  j["smoothed"] = r.smoothed;
  j["constant"] = r.constant;
  emit(c, j);
  return kOk;
}

int cmdCountProgram(const Config& c) {
  Program p = loadProgram(c.input);
  CountResult r = counter(p, c.epsilon, c.delta, modeOf(c), c.ov, c.seed, runOptions(c));
  emit(c, toJson(r, c.diagnostics));
  return kOk;
}

int cmdExact(const Config& c) {
  const std::string kind = inputKind(c);
  ordered_json j;
  j["schema"] = kSchemaVersion;
  j["kind"] = kind;
  if (kind == "program") {
    j["count"] = enumerateSupport(loadProgram(c.input)).size();
  } else if (kind == "cfg") {
    j["n"] = c.n;
    j["count"] = bruteCfgCount(parseGrammar(readFile(c.input)), c.n);
  } else if (kind == "nnf") {
    j["count"] = bruteDnnfCount(parseNnf(readFile(c.input)));
  } else {
    throw std::invalid_argument("unknown kind '" + kind + "'");
  }
  emit(c, j);
  return kOk;
}

int cmdValidate(const Config& c) {
  const std::string kind = inputKind(c);
  ordered_json j;
  j["schema"] = kSchemaVersion;
  j["kind"] = kind;
  ordered_json violations = ordered_json::array();
  if (kind == "program") {
    Program p = Program::parse(readFile(c.input));
    for (const auto& v : validateProgram(p).violations)
      violations.push_back({{"node", v.node}, {"check", std::string(toString(v.kind))}, {"message", v.message}});
  } else if (kind == "nnf") {
    NnfCircuit circ = parseNnf(readFile(c.input));
    for (const auto& v : checkDecomposable(circ))
      violations.push_back({{"node", v.node}, {"check", "decomposable"}, {"message", v.message}});
    for (const auto& v : checkSmooth(circ))
      violations.push_back({{"node", v.node}, {"check", "smooth"}, {"message", v.message}});
  } else if (kind == "cfg") {
    parseGrammar(readFile(c.input));
  } else {
    throw std::invalid_argument("unknown kind '" + kind + "'");
  }
  j["ok"] = violations.empty();
  j["violations"] = violations;
  emit(c, j);
  return violations.empty() ? kOk : kShape;
}

void writeFile(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
}

int cmdConvert(const Config& c) {
  const std::string kind = inputKind(c);
  const fs::path dir(c.outDir);
  fs::create_directories(dir);
  const std::string stem = fs::path(c.input).stem().string();
  ordered_json written = ordered_json::array();
  auto put = [&](const std::string& name, const std::string& text) {
    writeFile(dir / name, text);
    written.push_back((dir / name).string());
  };
  if (kind == "cfg") {
    if (c.n < 1) throw ParamError("--n must be at least 1");
    Grammar cnf = toCnf(parseGrammar(readFile(c.input)));
    UnionConcatProgram uc = cfgSliceProgram(cnf, c.n);
    put(stem + ".uc", uc.toText());
    if (!uc.empty) put(stem + ".pt", ucToPlusTimes(uc, c.n).first.toText());
  } else if (kind == "nnf") {
    NnfCircuit s = smooth(parseNnf(readFile(c.input)));
    put(stem + ".smooth.nnf", s.toText());
    auto tr = dnnfToPlusTimes(s);
    if (auto* prog = std::get_if<std::pair<Program, AssignmentDecoder>>(&tr)) put(stem + ".pt", prog->first.toText());
  } else if (kind == "program") {
    put(stem + ".reduced.pt", reduceDepth(loadProgram(c.input)).toText());
  } else {
    throw std::invalid_argument("unknown kind '" + kind + "'");
  }
  ordered_json j;
  j["schema"] = kSchemaVersion;
  j["written"] = written;
  emit(c, j);
  return kOk;
}

Program programFor(const Config& c) {
  const std::string kind = inputKind(c);
  if (kind == "program") return loadProgram(c.input);
  if (kind == "cfg") {
    if (c.n < 1) throw ParamError("--n must be at least 1");
    UnionConcatProgram uc = cfgSliceProgram(toCnf(parseGrammar(readFile(c.input))), c.n);
    if (uc.empty) throw std::invalid_argument("the slice is empty; nothing to sample");
    return ucToPlusTimes(uc, c.n).first;
  }
  if (kind == "nnf") {
    auto tr = dnnfToPlusTimes(smooth(parseNnf(readFile(c.input))));
    if (auto* prog = std::get_if<std::pair<Program, AssignmentDecoder>>(&tr)) return prog->first;
    throw std::invalid_argument("constant circuit; nothing to sample");
  }
  throw std::invalid_argument("unknown kind '" + kind + "'");
}

int cmdStats(const Config& c) {
  Program p = programFor(c);
  TrialReport r = runCoverageTrials(p, c.epsilon, c.delta, modeOf(c), c.ov, c.trials, c.seed, runOptions(c));
  ordered_json j = toJson(r);
  j["params"] = toJson(deriveParams(reduceDepth(p), c.epsilon, c.delta, modeOf(c), c.ov));
  emit(c, j);
  return kOk;
}

struct GenConfig {
  std::string what = "program";
  std::uint64_t seed = 1;
  std::string out;
  ProgramShape program;
  GrammarShape grammar;
  DnnfShape dnnf;
};

int cmdGenerate(const GenConfig& g) {
  std::string text;
  if (g.what == "program")
    text = randomProgram(g.seed, g.program).toText();
  else if (g.what == "cfg")
    text = randomGrammar(g.seed, g.grammar).toText();
  else if (g.what == "dnnf")
    text = randomDnnf(g.seed, g.dnnf).toText();
  else if (g.what == "chain")
    text = chainProgram(g.program.degree).toText();
  else if (g.what == "comb")
    text = combProgram(g.program.degree, g.program.maxLeafFanin).toText();
  else
    throw std::invalid_argument("unknown generator '" + g.what + "'");
  if (g.out.empty())
    std::cout << text;
  else
    writeFile(g.out, text);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Approximate counting for (+,x) programs, CFG slices and DNNF circuits"};
  app.require_subcommand(1);
  Config c;
  GenConfig gen;

  auto inputOpt = [&](CLI::App* sub) { sub->add_option("input", c.input, "input file")->required(); };
  auto kindOpt = [&](CLI::App* sub) {
    sub->add_option("--kind", c.kind, "input kind")
        ->check(CLI::IsMember({"auto", "program", "cfg", "nnf"}))
        ->capture_default_str();
  };
  auto jsonOpt = [&](CLI::App* sub) { sub->add_flag("--json", c.json, "JSON output"); };

  auto* countCfgCmd = app.add_subcommand("count-cfg", "estimate |L_n(G)| for a grammar");
  inputOpt(countCfgCmd);
  countCfgCmd->add_option("--n", c.n, "word length")->required();
  addRandomized(countCfgCmd, c);
  jsonOpt(countCfgCmd);

  auto* countDnnfCmd = app.add_subcommand("count-dnnf", "estimate the model count of a DNNF circuit");
  inputOpt(countDnnfCmd);
  addRandomized(countDnnfCmd, c);
  jsonOpt(countDnnfCmd);

  auto* countProgramCmd = app.add_subcommand("count-program", "estimate the support size of a (+,x) program");
  inputOpt(countProgramCmd);
  addRandomized(countProgramCmd, c);
  jsonOpt(countProgramCmd);

  auto* exactCmd = app.add_subcommand("exact", "exact count by enumeration");
  inputOpt(exactCmd);
  kindOpt(exactCmd);
  exactCmd->add_option("--n", c.n, "word length (grammars)");
  jsonOpt(exactCmd);

  auto* validateCmd = app.add_subcommand("validate", "structural checks");
  inputOpt(validateCmd);
  kindOpt(validateCmd);
  jsonOpt(validateCmd);

  auto* convertCmd = app.add_subcommand("convert", "write intermediate programs and circuits");
  inputOpt(convertCmd);
  kindOpt(convertCmd);
  convertCmd->add_option("--n", c.n, "word length (grammars)");
  convertCmd->add_option("--out-dir", c.outDir, "output directory")->capture_default_str();
  jsonOpt(convertCmd);

  auto* statsCmd = app.add_subcommand("stats", "coverage trials against the exact count");
  inputOpt(statsCmd);
  kindOpt(statsCmd);
  statsCmd->add_option("--n", c.n, "word length (grammars)");
  statsCmd->add_option("--trials", c.trials, "number of seeded trials")->capture_default_str();
  addRandomized(statsCmd, c);
  jsonOpt(statsCmd);

  auto* genCmd = app.add_subcommand("generate", "seeded random instance");
  genCmd->add_option("what", gen.what, "program, cfg, dnnf, chain or comb")
      ->check(CLI::IsMember({"program", "cfg", "dnnf", "chain", "comb"}))
      ->required();
  genCmd->add_option("--seed", gen.seed)->capture_default_str();
  genCmd->add_option("--out", gen.out, "output file (default stdout)");
  genCmd->add_option("--vars", gen.program.numVars, "program variables")->capture_default_str();
  genCmd->add_option("--degree", gen.program.degree, "program degree (chain/comb length)")->capture_default_str();
  genCmd->add_option("--min-terms", gen.program.minTerms)->capture_default_str();
  genCmd->add_option("--max-terms", gen.program.maxTerms)->capture_default_str();
  genCmd->add_option("--min-leaf-fanin", gen.program.minLeafFanin)->capture_default_str();
  genCmd->add_option("--max-leaf-fanin", gen.program.maxLeafFanin, "also comb teeth")->capture_default_str();
  genCmd->add_option("--nonterminals", gen.grammar.nonterminals)->capture_default_str();
  genCmd->add_option("--alphabet", gen.grammar.alphabet)->capture_default_str();
  genCmd->add_option("--nnf-vars", gen.dnnf.numVars)->capture_default_str();
  genCmd->add_option("--nnf-depth", gen.dnnf.maxDepth)->capture_default_str();
  genCmd->add_flag("!--non-smooth", gen.dnnf.smooth, "skip smoothing the DNNF");

  CLI11_PARSE(app, argc, argv);

  try {
    if (countCfgCmd->parsed()) return cmdCountCfg(c);
    if (countDnnfCmd->parsed()) return cmdCountDnnf(c);
    if (countProgramCmd->parsed()) return cmdCountProgram(c);
    if (exactCmd->parsed()) return cmdExact(c);
    if (validateCmd->parsed()) return cmdValidate(c);
    if (convertCmd->parsed()) return cmdConvert(c);
    if (statsCmd->parsed()) return cmdStats(c);
    if (genCmd->parsed()) return cmdGenerate(gen);
  } catch (const InputMissing& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kParse;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kParse;
  } catch (const ParamError& e) {
    std::cerr << "parameter error: " << e.what() << "\n";
    return kParams;
  } catch (const CircuitShapeError& e) {
    std::cerr << "circuit shape error: " << e.what() << "\n";
    return kShape;
  } catch (const OracleRefusal& e) {
    std::cerr << "oracle refused: " << e.what() << "\n";
    return kRefusal;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  }
  return kInvalid;
}
