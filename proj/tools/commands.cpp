#include "commands.hpp"

#include "derive_cc.hpp"
#include "tenet/canonicalize.hpp"
#include "tenet/interp.hpp"
#include "tenet/ir.hpp"
#include "tenet/parser.hpp"
#include "tenet/wick.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace tenet::cli {

namespace {

using nlohmann::json;

struct Config {
  std::string registry;
  std::string input;  // file, "-" or empty for stdin
  std::vector<std::string> exprs;
  std::string format = "dsl";
  std::string vacuum = "fermi";
  bool full = false;
  std::string connect;
  bool no_topology = false;
  bool no_connectivity = false;
  unsigned threads = 1;
  std::string extents;
  bool fuse = false;
  bool no_cache = false;
  int max_rank = 2;
  std::vector<std::string> tensors;
  std::vector<std::string> variables;
};

// input problems that carry a position
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Line {
  std::size_t number;
  std::string text;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep))
    if (!trim(cur).empty()) out.push_back(trim(cur));
  return out;
}

std::pair<std::string, std::string> key_value(const std::string& s) {
  const auto eq = s.find('=');
  if (eq == std::string::npos || eq == 0) throw CLI::ValidationError("expected key=value, got '" + s + "'");
  return {trim(s.substr(0, eq)), trim(s.substr(eq + 1))};
}

std::vector<Line> read_lines(const Config& c, std::istream& in) {
  std::vector<Line> lines;
  if (!c.exprs.empty()) {
    for (std::size_t k = 0; k < c.exprs.size(); ++k) lines.push_back({k + 1, c.exprs[k]});
    return lines;
  }
  std::ifstream file;
  std::istream* src = &in;
  if (!c.input.empty() && c.input != "-") {
    file.open(c.input);
    if (!file) throw InputError("cannot open " + c.input);
    src = &file;
  }
  std::string s;
  std::size_t n = 0;
  while (std::getline(*src, s)) {
    ++n;
    const std::string t = trim(s);
    if (t.empty() || t[0] == '#') continue;
    lines.push_back({n, s});
  }
  return lines;
}

// the second occurrence of the offending index is the one that breaks covariance
SourceSpan covariance_span(const std::string& what, const std::string& text) {
  const auto at = what.find("index ");
  if (at == std::string::npos) return {0, text.size()};
  const std::string label = what.substr(at + 6, what.find(' ', at + 6) - at - 6);
  auto is_word = [](char ch) { return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_'; };
  std::vector<std::size_t> hits;
  for (auto p = text.find(label); p != std::string::npos; p = text.find(label, p + 1)) {
    const bool lb = p == 0 || !is_word(text[p - 1]);
    const bool rb = p + label.size() >= text.size() || !is_word(text[p + label.size()]);
    if (lb && rb) hits.push_back(p);
  }
  if (hits.empty()) return {0, text.size()};
  const auto p = hits.size() > 1 ? hits[1] : hits[0];
  return {p, p + label.size()};
}

std::string located(const std::string& source, const Line& l, SourceSpan s, const std::string& kind,
                    const std::string& what) {
  std::ostringstream os;
  os << source << ":" << l.number << ":" << s.begin + 1 << "-" << std::max(s.end, s.begin + 1) << ": " << kind << ": "
     << what;
  return os.str();
}

IndexSpaceRegistry load_registry(const Config& c) {
  std::string path = c.registry;
  if (path.empty())
    if (const char* env = std::getenv("TENET_REGISTRY")) path = env;
  IndexSpaceRegistry reg = path.empty() ? IndexSpaceRegistry::make_default() : IndexSpaceRegistry::load(path);
  for (const auto& kv : split(c.extents, ',')) {
    auto [k, v] = key_value(kv);
    std::size_t n = 0;
    try {
      n = std::stoul(v);
    } catch (const std::exception&) {
      throw CLI::ValidationError("bad extent '" + kv + "'");
    }
    if (!reg.contains(k)) throw CLI::ValidationError("unknown space '" + k + "' in --extents");
    reg.set_extent(k, n);
  }
  reg.freeze();
  return reg;
}

WickOptions wick_options(const Config& c, const IndexSpaceRegistry& reg) {
  WickOptions o;
  if (c.vacuum == "genuine")
    o.vacuum = Vacuum::genuine;
  else if (c.vacuum == "fermi")
    o.vacuum = Vacuum::fermi;
  else
    throw CLI::ValidationError("--vacuum must be genuine or fermi");
  o.full_contractions = c.full;
  o.topology = !c.no_topology;
  o.use_connectivity = !c.no_connectivity;
  o.threads = std::max(1u, c.threads);
  o.registry = &reg;
  for (const auto& pair : split(c.connect, ',')) {
    const auto colon = pair.find(':');
    if (colon == std::string::npos) throw CLI::ValidationError("--connect expects A:B pairs");
    try {
      o.connectivity.emplace_back(std::stoi(pair.substr(0, colon)), std::stoi(pair.substr(colon + 1)));
    } catch (const std::exception&) {
      throw CLI::ValidationError("bad --connect pair '" + pair + "'");
    }
  }
  return o;
}

json index_json(const std::vector<Index>& v) {
  json a = json::array();
  for (const auto& i : v) a.push_back(i.is_null() ? "" : serialize(i));
  return a;
}

json expr_json(const ExprHandle& e, const IndexSpaceRegistry& reg) {
  switch (e->kind()) {
    case ExprKind::constant: return {{"constant", e->scalar().str()}};
    case ExprKind::variable: return {{"variable", e->variable().name}};
    case ExprKind::tensor: {
      const auto& t = e->tensor();
      return {{"tensor",
               {{"label", t.label},
                {"bra", index_json(t.bra)},
                {"ket", index_json(t.ket)},
                {"aux", index_json(t.aux)},
                {"symmetry", symtag({t.symmetry, t.braket_symmetry, t.column_symmetry})},
                {"conjugated", t.conjugated}}}};
    }
    case ExprKind::normal_operator: {
      const auto& op = e->op();
      return {{"operator",
               {{"vacuum", op.vacuum == Vacuum::fermi ? "fermi" : "genuine"},
                {"annihilators", index_json(op.annihilators)},
                {"creators", index_json(op.creators)}}}};
    }
    case ExprKind::sum: {
      json a = json::array();
      for (const auto& t : *e) a.push_back(expr_json(t, reg));
      return {{"sum", a}};
    }
    case ExprKind::product: {
      json a = json::array();
      for (const auto& f : *e) a.push_back(expr_json(f, reg));
      return {{"product", {{"coefficient", e->scalar().str()}, {"factors", a}}}};
    }
  }
  return nullptr;
}

// network graph of a term's tensors and operators, externals named
std::string term_dot(const ExprHandle& term, const IndexSpaceRegistry& reg) {
  TensorNetwork tn;
  for (const auto& f : split_term(term).second)
    if (f->is(ExprKind::tensor) || f->is(ExprKind::normal_operator)) tn.factors.push_back(f);
  tn.named = external_indices(tn.factors);
  GraphOptions go;
  go.registry = &reg;
  return build_graph(tn, go).dot();
}

using Handler = std::function<void(const Line&, const ExprHandle&)>;

// parse every line, mapping parse and covariance failures to located input errors
void for_each_line(const Config& c, std::istream& in, const IndexSpaceRegistry& reg, const Handler& h) {
  const std::string source = c.exprs.empty() ? (c.input.empty() || c.input == "-" ? "<stdin>" : c.input) : "<expr>";
  for (const auto& l : read_lines(c, in)) {
    try {
      h(l, parse_expr(l.text, reg));
    } catch (const ParseError& e) {
      throw InputError(located(source, l, e.span(), "parse error", e.what()));
    } catch (const CovarianceError& e) {
      throw InputError(located(source, l, covariance_span(e.what(), l.text), "covariance error", e.what()));
    }
  }
}

void cmd_parse(const Config& c, std::istream& in, std::ostream& out, const IndexSpaceRegistry& reg) {
  for_each_line(c, in, reg, [&](const Line&, const ExprHandle& e) {
    if (c.format == "json")
      out << expr_json(e, reg).dump() << "\n";
    else if (c.format == "dot")
      for (const auto& t : terms_of(e)) out << term_dot(t, reg);
    else
      out << serialize(e, reg) << "\n";
  });
}

void cmd_canonicalize(const Config& c, std::istream& in, std::ostream& out, const IndexSpaceRegistry& reg) {
  for_each_line(c, in, reg, [&](const Line& l, const ExprHandle& e) {
    std::vector<ExprHandle> terms;
    for (const auto& t : terms_of(e)) {
      auto ct = canonicalize_term(t, true, reg);
      if (ct.zero) continue;
      terms.push_back(product(ct.coefficient, std::move(ct.factors)));
    }
    const ExprHandle r = terms.empty() ? constant(Scalar(0)) : terms.size() == 1 ? terms[0] : sum(terms);
    if (c.format == "json") {
      json a = json::array();
      for (const auto& t : terms) a.push_back(serialize(t, reg));
      out << json{{"input", trim(l.text)}, {"canonical", serialize(r, reg)}, {"terms", a}}.dump() << "\n";
    } else {
      out << serialize(r, reg) << "\n";
      if (c.format == "dot")
        for (const auto& t : terms) out << term_dot(t, reg);
    }
  });
}

void cmd_wick(const Config& c, std::istream& in, std::ostream& out, std::ostream& err, const IndexSpaceRegistry& reg) {
  const WickOptions o = wick_options(c, reg);
  for_each_line(c, in, reg, [&](const Line& l, const ExprHandle& e) {
    WickStats st;
    const auto t0 = std::chrono::steady_clock::now();
    const ExprHandle r = wick_full_pipeline(e, o, &st);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    err << "line " << l.number << ": raw_terms=" << st.terms << " nodes=" << st.nodes
        << " terms=" << terms_of(r).size() * !is_zero(r) << " seconds=" << secs << "\n";
    if (c.format == "json")
      out << json{{"input", trim(l.text)}, {"result", serialize(r, reg)}, {"raw_terms", st.terms}, {"nodes", st.nodes}}
                 .dump()
          << "\n";
    else
      out << serialize(r, reg) << "\n";
  });
}

void cmd_derive_cc(const Config& c, std::ostream& out, std::ostream& err, const IndexSpaceRegistry& reg) {
  CCOptions o;
  o.max_rank = c.max_rank;
  o.topology = !c.no_topology;
  o.use_connectivity = !c.no_connectivity;
  o.registry = &reg;
  const CCResult r = derive_cc(o);
  err << "derive-cc " << c.max_rank << ": raw_terms=" << r.stats.terms << " nodes=" << r.stats.nodes
      << " seconds=" << r.seconds << "\n";
  json j;
  for (std::size_t k = 0; k < r.residuals.size(); ++k) {
    const std::string name = "R" + std::to_string(k);
    const std::string text = serialize(r.residuals[k], reg);
    if (c.format == "json")
      j[name] = text;
    else
      out << name << " = " << text << "\n";
  }
  if (c.format == "json") out << j.dump() << "\n";
}

// input lines are summed into one expression unless they are planned separately
std::vector<ExprHandle> plan_inputs(const Config& c, std::istream& in, const IndexSpaceRegistry& reg) {
  std::vector<ExprHandle> es;
  for_each_line(c, in, reg, [&](const Line&, const ExprHandle& e) { es.push_back(e); });
  if (es.empty()) throw InputError("no input expression");
  if (!c.fuse) return es;
  std::vector<ExprHandle> out;
  for (const auto& e : es) {
    auto terms = terms_of(e);
    // greedy pairwise fusion, first match wins
    for (bool changed = true; changed;) {
      changed = false;
      for (std::size_t a = 0; a < terms.size() && !changed; ++a)
        for (std::size_t b = a + 1; b < terms.size() && !changed; ++b)
          if (auto f = fuse(terms[a], terms[b], &reg)) {
            terms[a] = *f;
            terms.erase(terms.begin() + static_cast<std::ptrdiff_t>(b));
            changed = true;
          }
    }
    out.push_back(terms.size() == 1 ? terms[0] : sum(terms));
  }
  return out;
}

void cmd_plan(const Config& c, std::istream& in, std::ostream& out, std::ostream& err, const IndexSpaceRegistry& reg) {
  const auto ext = registry_extents(reg);
  std::vector<IRPtr> roots;
  for (const auto& e : plan_inputs(c, in, reg)) {
    if (c.fuse) err << "fused: " << serialize(e, reg) << "\n";
    roots.push_back(lower(e, ext, &reg));
  }
  const Plan p = mark_cse(roots);
  double flops = 0;
  for (const auto& r : p.roots) flops += total_flops(*r);
  err << "plan: roots=" << p.roots.size() << " shared=" << p.shared << " flops=" << flops << "\n";
  out << plan_json(p, reg) << "\n";
}

Result load_tensor(const std::string& path) {
  const bool is_json = path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0;
  if (!is_json) return Result(read_tnt1(path));
  std::ifstream is(path);
  if (!is) throw EvalError("cannot open " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return result_from_json(ss.str());
}

void cmd_eval(const Config& c, std::istream& in, std::ostream& out, std::ostream& err, const IndexSpaceRegistry& reg) {
  std::map<std::string, Result> tensors;
  for (const auto& t : c.tensors) {
    auto [k, path] = key_value(t);
    tensors[k] = load_tensor(path);
  }
  std::map<std::string, double> vars;
  for (const auto& v : c.variables) {
    auto [k, val] = key_value(v);
    try {
      vars[k] = std::stod(val);
    } catch (const std::exception&) {
      throw CLI::ValidationError("bad value in --var " + v);
    }
  }
  const auto ext = registry_extents(reg);
  const auto leaves = block_leaves(std::move(tensors), reg, std::move(vars));
  std::vector<IRPtr> roots;
  for (const auto& e : plan_inputs(c, in, reg)) roots.push_back(lower(e, ext, &reg));
  const Plan p = mark_cse(roots);
  CacheManager cache(p, !c.no_cache);
  for (const auto& r : p.roots) {
    EvalStats st;
    const auto t0 = std::chrono::steady_clock::now();
    const Result v = evaluate(*r, leaves, ext, &cache, &st);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    err << "eval: products=" << st.products << " sums=" << st.sums << " leaves=" << st.leaves
        << " cache_hits=" << cache.hits() << " seconds=" << secs << "\n";
    json layout = json::array();
    for (const auto& i : r->layout) layout.push_back(serialize(i));
    out << json{{"layout", layout}, {"value", json::parse(result_to_json(v))}}.dump() << "\n";
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  Config c;
  CLI::App app{"symbolic tensor algebra: parse, canonicalize, Wick, plan, evaluate", "tenet"};
  app.require_subcommand(1);
  app.add_option("--registry", c.registry, "index-space registry JSON (fallback: $TENET_REGISTRY)");
  app.add_option("--extents", c.extents, "extent overrides, e.g. i=4,a=6");
  app.add_option("--format", c.format, "output format")->check(CLI::IsMember({"dsl", "json", "dot"}));

  auto add_input = [&](CLI::App* s) {
    s->add_option("input", c.input, "input file, '-' or omitted for stdin");
    s->add_option("-e,--expr", c.exprs, "expression given inline (repeatable)");
  };
  auto add_wick = [&](CLI::App* s) {
    s->add_option("--vacuum", c.vacuum, "genuine or fermi")->check(CLI::IsMember({"genuine", "fermi"}));
    s->add_flag("--full-contractions", c.full, "keep fully contracted terms only");
    s->add_option("--connect", c.connect, "operator pairs that must be connected, e.g. 0:1,0:2");
    s->add_option("--threads", c.threads, "worker threads over summands")->check(CLI::PositiveNumber);
  };
  auto add_toggles = [&](CLI::App* s) {
    s->add_flag("--no-topology", c.no_topology, "disable topological equivalence");
    s->add_flag("--no-connectivity", c.no_connectivity, "disable connectivity pruning");
  };

  auto* parse = app.add_subcommand("parse", "parse and print in canonical text form");
  auto* canon = app.add_subcommand("canonicalize", "canonicalize every term");
  auto* wick = app.add_subcommand("wick", "Wick's theorem, delta reduction and simplification");
  auto* cc = app.add_subcommand("derive-cc", "coupled-cluster amplitude equations");
  auto* plan = app.add_subcommand("plan", "evaluation plan as JSON");
  auto* eval = app.add_subcommand("eval", "evaluate with leaf tensors from files");
  for (auto* s : {parse, canon, wick, plan, eval}) add_input(s);
  add_wick(wick);
  add_toggles(wick);
  add_toggles(cc);
  cc->add_option("max_rank", c.max_rank, "highest excitation rank (1-4)")->required();
  for (auto* s : {plan, eval}) s->add_flag("--fuse", c.fuse, "fuse pairs of terms with common subnetworks first");
  eval->add_option("--tensor", c.tensors, "leaf data label=file (.tnt or .json); label may carry spaces, t[a,i]");
  eval->add_option("--var", c.variables, "variable value name=x");
  eval->add_flag("--no-cache", c.no_cache, "disable the intermediate cache");
  for (auto* s : {parse, canon, wick, cc, plan, eval}) s->fallthrough();

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? ok : usage;
  }

  try {
    const IndexSpaceRegistry reg = load_registry(c);
    if (*parse) cmd_parse(c, in, out, reg);
    if (*canon) cmd_canonicalize(c, in, out, reg);
    if (*wick) cmd_wick(c, in, out, err, reg);
    if (*cc) cmd_derive_cc(c, out, err, reg);
    if (*plan) cmd_plan(c, in, out, err, reg);
    if (*eval) cmd_eval(c, in, out, err, reg);
  } catch (const CLI::ValidationError& e) {
    err << "usage error: " << e.what() << "\n";
    return usage;
  } catch (const InputError& e) {
    err << e.what() << "\n";
    return input_error;
  } catch (const EvalError& e) {
    err << "eval error: " << e.what() << "\n";
    return input_error;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return input_error;
  } catch (const CovarianceError& e) {
    err << "covariance error: " << e.what() << "\n";
    return input_error;
  } catch (const std::invalid_argument& e) {
    err << "input error: " << e.what() << "\n";
    return input_error;
  } catch (const json::exception& e) {
    err << "input error: " << e.what() << "\n";
    return input_error;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return internal_error;
  }
  return ok;
}

}  // namespace tenet::cli
