#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

#include "hvm/hvm.hpp"

namespace {

using hvm::Bits;
using hvm::DomainError;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError(path + ": cannot open file");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DomainError(path + ": cannot write file");
  out << text;
}

std::string digest(std::string_view bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) h = (h ^ c) * 1099511628211ULL;
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << h;
  return s.str();
}

/// State shared by one command execution, also what a manifest records.
struct Session {
  std::ostream& out;
  std::vector<std::string> input_files;
  std::optional<std::uint64_t> seed;

  std::string load(const std::string& path) {
    input_files.push_back(path);
    return read_file(path);
  }
};

std::pair<std::string, std::string> split_assignment(const std::string& s, const char* what) {
  const auto eq = s.find('=');
  if (eq == std::string::npos) throw DomainError(std::string(what) + " '" + s + "' needs the form name=value");
  return {s.substr(0, eq), s.substr(eq + 1)};
}

hvm::Bindings parse_bindings(const std::vector<std::string>& binds) {
  hvm::Bindings env;
  for (const auto& b : binds) env.insert(split_assignment(b, "binding"));
  return env;
}

/// `REG=bits` entries; a bare bit string goes to I.
hvm::Inputs parse_inputs(const std::vector<std::string>& specs) {
  hvm::Inputs inputs;
  for (const auto& s : specs) {
    if (s.find('=') == std::string::npos) {
      inputs[hvm::RegisterSetId::input()] = hvm::parse_bits(s);
      continue;
    }
    auto [reg, bits] = split_assignment(s, "input");
    inputs[hvm::parse_regset(reg)] = hvm::parse_bits(bits);
  }
  return inputs;
}

std::set<Bits> parse_bit_set(const std::string& list, std::uint64_t n) {
  std::set<Bits> out;
  std::istringstream in(list);
  for (std::string item; std::getline(in, item, ',');) {
    if (item.empty()) continue;
    Bits b = hvm::parse_bits(item);
    if (b.size() != n) throw DomainError("set element " + item + " is not a " + std::to_string(n) + "-bit string");
    out.insert(std::move(b));
  }
  return out;
}

std::set<std::int64_t> parse_number_set(const std::string& list) {
  std::set<std::int64_t> out;
  std::istringstream in(list);
  for (std::string item; std::getline(in, item, ',');) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      const long long v = std::stoll(item, &used);
      if (used != item.size() || v < 0) throw std::invalid_argument(item);
      out.insert(v);
    } catch (const std::logic_error&) {
      throw DomainError("set element '" + item + "' is not a natural number");
    }
  }
  return out;
}

void print_registers(std::ostream& out, const hvm::Configuration& c, std::uint64_t n) {
  for (const auto& [id, reg] : c.registers)
    out << "register=" << id.to_string() << " head=" << reg.head << " bits=" << hvm::to_string(c.dense(id, n)) << '\n';
}

// ---------------------------------------------------------------------------

struct AssembleArgs {
  std::string file;
  std::vector<std::string> binds;
  std::uint64_t trunc = 0;
  std::string output;
};

void cmd_assemble(Session& s, const AssembleArgs& a) {
  auto ex = hvm::expand_text(s.load(a.file), parse_bindings(a.binds), a.trunc);
  ex.program.validate();
  for (const auto& w : ex.warnings) std::cerr << "warning: " << w << '\n';
  const std::string text = hvm::format_program(ex.program);
  if (a.output.empty()) {
    s.out << text;
  } else {
    write_file(a.output, text);
    s.out << "instructions=" << ex.program.instructions.size() << '\n' << "output_file=" << a.output << '\n';
  }
}

struct RunArgs {
  std::string file;
  std::vector<std::string> inputs;
  std::vector<std::string> binds;
  std::uint64_t trunc = 0;
  std::uint64_t budget = 1'000'000;
  std::string cap;
  std::string trace;
  bool strict = false;
  bool no_limits = false;
  bool show = false;
};

void cmd_run(Session& s, const RunArgs& a) {
  hvm::Program p = hvm::expand_text(s.load(a.file), parse_bindings(a.binds), a.trunc).program;
  if (!a.cap.empty()) p.spec.cap = hvm::Ordinal::parse(a.cap);
  hvm::Machine m(p);
  hvm::RunOptions opt;
  opt.budget = a.budget;
  opt.limits = !a.no_limits;
  opt.trace = !a.trace.empty();
  opt.step.strict_conflicts = a.strict;
  const auto res = hvm::run(m, parse_inputs(a.inputs), opt);
  std::string trace_text;
  for (const auto& line : res.trace) trace_text += line + "\n";
  if (opt.trace && a.trace != "-") write_file(a.trace, trace_text);
  const std::uint64_t n = m.registers();
  s.out << "halted=" << res.halted() << '\n';
  if (res.halted()) s.out << "reason=" << hvm::to_string(res.reason) << '\n';
  s.out << "state=" << res.config.state << '\n'
        << "clock=" << res.config.clock << '\n'
        << "steps=" << res.steps << '\n'
        << "limits=" << res.limits.size() << '\n'
        << "flag=" << res.flag() << '\n'
        << "output=" << hvm::to_string(hvm::read_output(res.config, n)) << '\n';
  for (const auto& ev : res.limits) {
    s.out << "limit=" << ev.lambda << " certificate=" << hvm::to_string(ev.certificate.kind)
          << " prefix=" << ev.certificate.prefix_length << " period=" << ev.certificate.period;
    for (const auto& [r, shift] : ev.certificate.head_shift) s.out << " shift=" << r.to_string() << ':' << shift;
    s.out << '\n';
  }
  if (a.show) print_registers(s.out, res.config, n);
  if (a.trace == "-") s.out << trace_text;
  if (!res.halted()) throw DomainError("step budget of " + std::to_string(a.budget) + " exhausted without a certificate");
}

struct RunParallelArgs {
  std::string file;
  std::string input;
  std::string combine;
  std::uint64_t budget = 1'000'000;
  bool no_limits = false;
  bool show = false;
};

void cmd_run_parallel(Session& s, const RunParallelArgs& a) {
  hvm::ParallelProgram pp = hvm::parse_parallel(s.load(a.file));
  if (!a.combine.empty()) pp.combine = hvm::parse_combine(a.combine);
  Bits image;
  if (!a.input.empty()) {
    const auto inputs = parse_inputs({a.input});
    if (inputs.size() != 1 || !inputs.count(hvm::RegisterSetId::input()))
      throw DomainError("run-parallel takes its input image as I=<bits>");
    image = inputs.begin()->second;
  }
  hvm::ParallelOptions opt;
  opt.budget = a.budget;
  opt.limits = !a.no_limits;
  const auto res = hvm::run_parallel(pp, image, opt);
  s.out << "stages=" << res.stages.size() << '\n';
  for (std::size_t i = 0; i < res.stages.size(); ++i) {
    const auto& st = res.stages[i];
    s.out << "stage=" << i << " banks=" << st.banks.size() << " ticks=" << st.ticks
          << " outputs=" << hvm::to_string(st.outputs);
    if (st.management) s.out << " management=" << *st.management;
    s.out << '\n';
    if (a.show)
      for (std::size_t g = 0; g < st.banks.size(); ++g)
        s.out << "bank=" << g << " halted=" << st.banks[g].halted() << " state=" << st.banks[g].config.state
              << " clock=" << st.banks[g].config.clock << '\n';
  }
  s.out << "undetermined=" << res.undetermined << '\n';
  if (res.management()) s.out << "flag=" << *res.management() << '\n';
  if (res.undetermined) throw DomainError("a bank exhausted the step budget without a certificate");
}

struct CompileArgs {
  std::string file;
  std::uint64_t n = 2;
  std::string mode = "serial";
  std::string output;
  bool random = false;
  std::uint64_t seed = 1;
  std::size_t quantifiers = 3;
  bool no_run = false;
};

void cmd_compile_formula(Session& s, const CompileArgs& a) {
  hvm::logic::FormulaText ft;
  if (a.random) {
    s.seed = a.seed;
    std::mt19937_64 rng(a.seed);
    hvm::logic::GeneratorOptions g;
    g.n = a.n;
    g.max_quantifiers = a.quantifiers;
    ft = hvm::logic::generate_formula(rng, g);
    s.out << "formula=" << hvm::logic::to_string(ft.formula) << '\n';
  } else {
    if (a.file.empty()) throw DomainError("compile-formula needs a formula file or --random");
    ft = hvm::logic::parse_formula(s.load(a.file));
  }
  const hvm::logic::DomainSpec d{a.n};
  if (a.mode == "serial") {
    const hvm::Program p = hvm::logic::compile_serial(ft, d);
    s.out << "mode=serial\n"
          << "instructions=" << p.instructions.size() << '\n'
          << "states=" << p.spec.states << '\n'
          << "registers=" << p.spec.registers << '\n';
    if (!a.output.empty()) write_file(a.output, hvm::format_program(p, false));
    if (!a.no_run) s.out << "flag=" << hvm::logic::run_serial(p) << '\n';
  } else if (a.mode == "parallel") {
    const hvm::ParallelProgram pp = hvm::logic::compile_parallel(ft, d);
    s.out << "mode=parallel\n";
    std::size_t k = 0;
    for (const hvm::ParallelProgram* st = &pp; st; st = st->next.get(), ++k)
      s.out << "stage=" << k << " banks=" << st->banks.size() << " combine=" << hvm::to_string(st->combine) << '\n';
    if (!a.output.empty()) write_file(a.output, hvm::format_parallel(pp));
    if (!a.no_run) s.out << "flag=" << hvm::logic::run_compiled_parallel(pp) << '\n';
  } else {
    throw DomainError("--mode must be serial or parallel, got '" + a.mode + "'");
  }
  if (!a.no_run) s.out << "direct=" << hvm::logic::eval_direct(ft, d) << '\n';
}

void cmd_domain(Session& s, std::uint64_t n) {
  s.out << "n=" << n << '\n' << "track=" << hvm::to_string(hvm::logic::encode_domain({n})) << '\n';
}

struct InfoArgs {
  std::string bits;
  std::uint64_t n = 0;
  std::string set;
  std::string x;
  std::string complement;
  unsigned threads = 0;
  bool show = false;
};

void cmd_info_compress(Session& s, const InfoArgs& a) {
  const auto d = hvm::info::min_decomposition(hvm::parse_bits(a.bits));
  s.out << "length=" << a.bits.size() << '\n' << "compressible=" << d.compressible << '\n';
  if (d.compressible)
    s.out << "initial=" << hvm::to_string(d.initial) << '\n'
          << "pattern=" << hvm::to_string(d.pattern) << '\n'
          << "size=" << d.initial.size() + d.pattern.size() << '\n';
}

void cmd_info_census(Session& s, const InfoArgs& a) {
  const auto c = hvm::info::census(a.n, a.threads);
  s.out << "n=" << a.n << '\n' << "compressible=" << c.compressible << '\n' << "incompressible=" << c.incompressible << '\n';
}

void cmd_info_search(Session& s, const InfoArgs& a) {
  std::int64_t x = 0;
  try {
    x = std::stoll(a.x);
  } catch (const std::logic_error&) {
    throw DomainError("--x must be a number, got '" + a.x + "'");
  }
  const auto table = hvm::info::search_table(parse_number_set(a.set), a.n);
  const auto r = hvm::info::binary_search_decide(table, x, a.n);
  s.out << "found=" << r.found << '\n' << "probes=" << r.probes << '\n' << "iterations=" << r.iterations << '\n';
}

void cmd_info_interleave(Session& s, const InfoArgs& a) {
  auto p = hvm::info::enumeration_pair(parse_bit_set(a.set, a.n), a.n);
  if (!a.complement.empty()) {
    // Explicit enumeration order for the complement; partition is checked on use.
    p.g.clear();
    std::istringstream in(a.complement);
    for (std::string item; std::getline(in, item, ',');)
      if (!item.empty()) p.g.push_back(hvm::parse_bits(item));
  }
  const auto d = hvm::info::interleave_decide(p, hvm::parse_bits(a.x));
  s.out << "member=" << d.member << '\n' << "steps=" << d.steps << '\n';
}

void cmd_info_assoc(Session& s, const InfoArgs& a) {
  const auto set = hvm::info::associated_set(parse_bit_set(a.set, a.n), a.n);
  if (a.show)
    for (const auto& e : set.entries) s.out << "entry=" << hvm::to_string(e) << '\n';
  if (a.x.empty()) return;
  const auto d = hvm::info::assoc_decide(set, hvm::parse_bits(a.x));
  s.out << "member=" << d.member << '\n' << "bits_read=" << d.bits_read << '\n';
}

struct OrdinalArgs {
  std::string op;
  std::vector<std::string> operands;
};

void cmd_ordinal(Session& s, const OrdinalArgs& a) {
  std::vector<hvm::Ordinal> v;
  for (const auto& text : a.operands) v.push_back(hvm::Ordinal::parse(text));
  const std::size_t want = a.op == "add" || a.op == "mul" || a.op == "cmp" ? 2 : 1;
  if (v.size() != want)
    throw DomainError("ordinal " + a.op + " takes " + std::to_string(want) + " operand" + (want == 1 ? "" : "s"));
  if (a.op == "add") {
    s.out << "result=" << hvm::ord_add(v[0], v[1]) << '\n';
  } else if (a.op == "mul") {
    s.out << "result=" << hvm::ord_mul(v[0], v[1]) << '\n';
  } else if (a.op == "cmp") {
    const auto c = hvm::ord_cmp(v[0], v[1]);
    s.out << "result=" << (c < 0 ? "less" : c > 0 ? "greater" : "equal") << '\n';
  } else if (a.op == "prevlim") {
    s.out << "result=" << hvm::prevlim(v[0]) << '\n';
  } else if (a.op == "nextlim") {
    s.out << "result=" << hvm::nextlim(v[0]) << '\n';
  } else if (a.op == "split") {
    const auto [inf, fin] = hvm::split_inf_fin(v[0]);
    s.out << "inf=" << inf << '\n' << "fin=" << fin << '\n';
  } else if (a.op == "interleave") {
    const auto [source, index] = hvm::interleave_index(v[0]);
    s.out << "source=" << (source == hvm::Source::F ? "F" : "G") << '\n' << "index=" << index << '\n';
  } else {
    throw DomainError("unknown ordinal operation '" + a.op + "'");
  }
}

struct CorpusArgs {
  std::string name;
  std::uint64_t n = 8;
  std::uint64_t beta = 1;
  std::string output;
  bool list = false;
};

void cmd_corpus(Session& s, const CorpusArgs& a) {
  if (a.list || a.name.empty()) {
    for (const auto& [name, src] : hvm::corpus::sources()) s.out << "program=" << name << '\n';
    s.out << "program=split_compare\n";
    return;
  }
  const hvm::Program p =
      a.name == "split_compare" ? hvm::corpus::split_compare(a.n) : hvm::corpus::get(a.name, {a.n, a.beta});
  const std::string text = hvm::format_program(p);
  if (a.output.empty()) s.out << text;
  else write_file(a.output, text);
}

// ---------------------------------------------------------------------------

int execute(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

void cmd_replay(Session& s, const std::string& path) {
  nlohmann::json mf;
  try {
    mf = nlohmann::json::parse(s.load(path));
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(path + ": not a manifest (" + e.what() + ")");
  }
  if (mf.value("version", "") != hvm::kVersion)
    std::cerr << "warning: manifest written by version " << mf.value("version", "?") << '\n';
  for (const auto& in : mf.at("inputs")) {
    const std::string file = in.at("path");
    if (digest(read_file(file)) != in.at("digest").get<std::string>())
      throw DomainError(file + ": contents changed since the manifest was written");
  }
  std::ostringstream captured;
  const int code = execute(mf.at("args").get<std::vector<std::string>>(), captured, std::cerr);
  s.out << captured.str();
  if (code != mf.value("exit", 0)) throw DomainError("replay exit code " + std::to_string(code) + " differs");
  if (digest(captured.str()) != mf.at("output_digest").get<std::string>())
    throw DomainError("replay output differs from the recorded run");
  std::cerr << "replay: output matches\n";
}

/// Parses `args` (no program name) and runs one command; returns the exit code.
int execute(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hypercomputation register-machine toolkit", "hvm"};
  app.set_version_flag("--version", std::string("hvm ") + hvm::kVersion);
  app.require_subcommand(1);
  std::string manifest;
  app.add_option("--manifest", manifest, "Write a replay manifest to this file");

  // Output is buffered so a manifest can record its digest.
  std::ostringstream buffer;
  Session session{buffer, {}, {}};
  std::function<void()> action;

  AssembleArgs aa;
  auto* assemble = app.add_subcommand("assemble", "Expand a schema file into a concrete program");
  assemble->add_option("file", aa.file)->required();
  assemble->add_option("--bind", aa.binds, "Schema binding name=value");
  assemble->add_option("--trunc", aa.trunc, "Register surrogate N for truncated ranges");
  assemble->add_option("-o,--output", aa.output);
  assemble->callback([&] { action = [&] { cmd_assemble(session, aa); }; });

  RunArgs ra;
  auto* run = app.add_subcommand("run", "Run a program to completion");
  run->add_option("file", ra.file)->required();
  run->add_option("--input", ra.inputs, "REG=bits, or bare bits for I");
  run->add_option("--bind", ra.binds);
  run->add_option("--trunc", ra.trunc);
  run->add_option("--budget", ra.budget, "Concrete steps allowed per segment");
  run->add_option("--cap", ra.cap, "Clock cap ordinal, e.g. w*2");
  run->add_option("--trace", ra.trace, "Write the step trace to this file, or - for standard output");
  run->add_flag("--strict-conflicts", ra.strict);
  run->add_flag("--no-limits", ra.no_limits, "Disable limit jumps");
  run->add_flag("--show", ra.show, "Print every register after the run");
  run->callback([&] { action = [&] { cmd_run(session, ra); }; });

  RunParallelArgs pa;
  auto* runp = app.add_subcommand("run-parallel", "Run a parallel program in lockstep");
  runp->add_option("file", pa.file)->required();
  runp->add_option("--input", pa.input, "Shared input image I=bits");
  runp->add_option("--combine", pa.combine, "forall, exists or none");
  runp->add_option("--budget", pa.budget);
  runp->add_flag("--no-limits", pa.no_limits);
  runp->add_flag("--show", pa.show);
  runp->callback([&] { action = [&] { cmd_run_parallel(session, pa); }; });

  CompileArgs ca;
  auto* comp = app.add_subcommand("compile-formula", "Compile a first-order formula over n-bit strings");
  comp->add_option("file", ca.file);
  comp->add_option("--n", ca.n, "Bit width of the domain");
  comp->add_option("--mode", ca.mode, "serial or parallel");
  comp->add_option("-o,--output", ca.output);
  comp->add_flag("--random", ca.random, "Generate a formula instead of reading one");
  comp->add_option("--seed", ca.seed);
  comp->add_option("--quantifiers", ca.quantifiers, "Quantifier limit for --random");
  comp->add_flag("--no-run", ca.no_run);
  comp->callback([&] { action = [&] { cmd_compile_formula(session, ca); }; });

  std::uint64_t domain_n = 0;
  auto* domain = app.add_subcommand("domain", "Print the domain track of n-bit strings used by compiled formulas");
  domain->add_option("--n", domain_n)->required();
  domain->callback([&] { action = [&] { cmd_domain(session, domain_n); }; });

  InfoArgs ia;
  auto* info = app.add_subcommand("info", "Finite information experiments");
  info->require_subcommand(1);
  auto* compress = info->add_subcommand("compress", "Shortest periodic description of a bit string");
  compress->add_option("bits", ia.bits)->required();
  compress->callback([&] { action = [&] { cmd_info_compress(session, ia); }; });
  auto* census = info->add_subcommand("census", "Count compressible strings of length n");
  census->add_option("--n", ia.n)->required();
  census->add_option("--threads", ia.threads);
  census->callback([&] { action = [&] { cmd_info_census(session, ia); }; });
  auto* search = info->add_subcommand("search", "Binary-search membership");
  search->add_option("--set", ia.set, "Members, comma separated; omit for the empty set");
  search->add_option("--x", ia.x)->required();
  search->add_option("--n", ia.n)->required();
  search->callback([&] { action = [&] { cmd_info_search(session, ia); }; });
  auto* inter = info->add_subcommand("interleave", "Membership by interleaved enumeration");
  inter->add_option("--set", ia.set, "Members, comma separated; omit for the empty set");
  inter->add_option("--x", ia.x)->required();
  inter->add_option("--n", ia.n)->required();
  inter->add_option("--complement", ia.complement, "Enumeration order of the complement, comma separated");
  inter->callback([&] { action = [&] { cmd_info_interleave(session, ia); }; });
  auto* assoc = info->add_subcommand("assoc", "Membership through the associated set");
  assoc->add_option("--set", ia.set, "Members, comma separated; omit for the empty set");
  assoc->add_option("--x", ia.x);
  assoc->add_option("--n", ia.n)->required();
  assoc->add_flag("--show", ia.show);
  assoc->callback([&] { action = [&] { cmd_info_assoc(session, ia); }; });

  OrdinalArgs oa;
  auto* ordinal = app.add_subcommand("ordinal", "Ordinal arithmetic below w^w");
  ordinal->add_option("op", oa.op, "add, mul, cmp, prevlim, nextlim, split or interleave")->required();
  ordinal->add_option("operands", oa.operands)->required();
  ordinal->callback([&] { action = [&] { cmd_ordinal(session, oa); }; });

  CorpusArgs co;
  auto* corpus = app.add_subcommand("corpus", "Print a built-in program");
  corpus->add_option("name", co.name);
  corpus->add_option("--n", co.n);
  corpus->add_option("--beta", co.beta);
  corpus->add_option("-o,--output", co.output);
  corpus->add_flag("--list", co.list);
  corpus->callback([&] { action = [&] { cmd_corpus(session, co); }; });

  std::string replay_file;
  auto* replay = app.add_subcommand("replay", "Re-run a manifest and check its output");
  replay->add_option("manifest", replay_file)->required();
  replay->callback([&] { action = [&] { cmd_replay(session, replay_file); }; });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 1;
  }

  int code = 0;
  try {
    action();
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    code = 1;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    code = 2;
  }
  out << buffer.str();
  if (!manifest.empty()) {
    std::vector<std::string> replay_args;
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (args[i] == "--manifest") ++i;
      else if (args[i].rfind("--manifest=", 0) != 0) replay_args.push_back(args[i]);
    }
    nlohmann::json mf;
    mf["version"] = hvm::kVersion;
    mf["command"] = app.get_subcommands().front()->get_name();
    mf["args"] = replay_args;
    mf["flags"] = nlohmann::json::array();
    for (const auto& a : replay_args)
      if (a.size() > 1 && a[0] == '-') mf["flags"].push_back(a);
    mf["inputs"] = nlohmann::json::array();
    for (const auto& f : session.input_files)
      mf["inputs"].push_back({{"path", f}, {"digest", digest(read_file(f))}});
    mf["seed"] = session.seed ? nlohmann::json(*session.seed) : nlohmann::json(nullptr);
    mf["exit"] = code;
    mf["output_digest"] = digest(buffer.str());
    try {
      write_file(manifest, mf.dump(2) + "\n");
    } catch (const DomainError& e) {
      err << "error: " << e.what() << '\n';
      return code == 0 ? 1 : code;
    }
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return execute(args, std::cout, std::cerr);
}
