// sos: interpreters derived from the bundled semantics.
#include "sos/arith.hpp"
#include "sos/ccs.hpp"
#include "sos/render.hpp"
#include "sos/runtime.hpp"
#include "sos/tm.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

constexpr int kOk = 0;
constexpr int kDomainFailure = 1;
constexpr int kEngineFault = 2;
constexpr int kUsage = 64;

struct Config {
  std::optional<std::size_t> budget;
  std::optional<std::size_t> max_states;
  bool depth_first = false;
  bool color = false;
  std::string latex_out;
  unsigned workers = 1;
  bool print_trees = false;
  std::string input;
  std::string word;
  std::vector<std::string> defines;
};

sos::ExploreOptions explore_options(const Config& c) {
  sos::ExploreOptions o;
  o.max_states = c.max_states;
  o.successor.step_budget = c.budget;
  o.successor.order = c.depth_first ? sos::SearchOrder::DepthFirst : sos::SearchOrder::BreadthFirst;
  o.workers = c.workers;
  return o;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

std::string latex_trees(const sos::Lts& lts, const sos::RenderStyle& style) {
  std::string out;
  for (const auto& t : lts.transitions) out += "\\[ " + sos::render_tree(t.tree, style) + " \\]\n";
  return out;
}

int run_explore(const Config& c, const sos::System& system, const sos::TransitionSchema& schema, const sos::Term& init,
                void (*decorate)(sos::RenderStyle&)) {
  auto lts = sos::explore(system, schema, init, explore_options(c));
  auto console = sos::RenderStyle::console(c.color);
  decorate(console);
  std::cout << sos::explore_transcript(lts, console, c.print_trees);
  if (!c.latex_out.empty()) {
    auto latex = sos::RenderStyle::latex();
    decorate(latex);
    write_file(c.latex_out, latex_trees(lts, latex));
  }
  return kOk;
}

int run_print(const Config& c, const sos::System& system, void (*decorate)(sos::RenderStyle&)) {
  auto console = sos::RenderStyle::console(c.color);
  decorate(console);
  std::cout << sos::render_system(system, console);
  if (!c.latex_out.empty()) {
    auto latex = sos::RenderStyle::latex();
    decorate(latex);
    write_file(c.latex_out, sos::render_system(system, latex));
  }
  return kOk;
}

sos::Term ccs_environment(const std::vector<std::string>& defines) {
  std::map<std::string, sos::Term> bindings;
  for (const auto& d : defines) {
    auto eq = d.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("--define expects NAME=PROCESS, got '" + d + "'");
    std::string name = d.substr(0, eq);
    name.erase(name.find_last_not_of(' ') + 1);
    bindings.insert_or_assign(name, sos::ccs::parse_process(d.substr(eq + 1)));
  }
  return sos::ccs::environment(bindings);
}

void no_decoration(sos::RenderStyle&) {}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interpreters derived from structural operational semantics"};
  app.require_subcommand(1);
  app.fallthrough();
  Config c;
  app.add_option("--budget", c.budget, "Engine step cap (node expansions per question)")->check(CLI::PositiveNumber);
  app.add_option("--max-states", c.max_states, "Stop exploring after this many states")->check(CLI::PositiveNumber);
  app.add_flag("--depth-first", c.depth_first, "Depth-first instead of breadth-first engine search");
  app.add_flag("--color", c.color, "Colored console output");
  app.add_option("--latex-out", c.latex_out, "Also write LaTeX to this file");
  app.add_option("--workers", c.workers, "Expand frontier states concurrently")->check(CLI::PositiveNumber);

  auto* arith = app.add_subcommand("arith", "Arithmetic expressions")->require_subcommand(1);
  auto* arith_explore = arith->add_subcommand("explore", "Explore the state space of an expression");
  arith_explore->add_option("expr", c.input, "Expression, e.g. \"((3 + 12) + (4 + 42))\"")->required();
  arith_explore->add_flag("--print-trees", c.print_trees, "Print the inference tree of each transition");
  auto* arith_system = arith->add_subcommand("system", "The rule system")->require_subcommand(1);
  auto* arith_print = arith_system->add_subcommand("print", "Print all rules");

  auto* ccs = app.add_subcommand("ccs", "Calculus of Communicating Systems")->require_subcommand(1);
  auto* ccs_explore = ccs->add_subcommand("explore", "Explore the state space of a process");
  ccs_explore->add_option("process", c.input, "Process, e.g. \"(a?.0 || a!.0) \\ {a?, a!}\"")->required();
  ccs_explore->add_flag("--print-trees", c.print_trees, "Print the inference tree of each transition");
  ccs_explore->add_option("--define", c.defines, "Environment binding NAME=PROCESS (repeatable)");
  auto* ccs_system = ccs->add_subcommand("system", "The rule system")->require_subcommand(1);
  auto* ccs_print = ccs_system->add_subcommand("print", "Print all rules");
  auto* ccs_latexify = ccs->add_subcommand("latexify", "Write the rules as LaTeX");
  ccs_latexify->add_option("path", c.latex_out, "Output file")->required();

  auto* tm = app.add_subcommand("tm", "Turing machines compiled to inference rules")->require_subcommand(1);
  auto* tm_run = tm->add_subcommand("run", "Decide acceptance by derivation");
  tm_run->add_option("spec", c.input, "Machine description file")->required()->check(CLI::ExistingFile);
  tm_run->add_option("word", c.word, "Input word; characters, or comma separated symbols")->required();
  auto* tm_compile = tm->add_subcommand("compile", "Print the generated rule system");
  tm_compile->add_option("spec", c.input, "Machine description file")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return kUsage;
  }

  try {
    if (arith_explore->parsed())
      return run_explore(c, sos::arith::system(), sos::arith::schema(), sos::arith::parse_expr(c.input),
                         sos::arith::decorate);
    if (arith_print->parsed()) return run_print(c, sos::arith::system(), sos::arith::decorate);
    if (ccs_explore->parsed())
      return run_explore(c, sos::ccs::system(), sos::ccs::schema(ccs_environment(c.defines)),
                         sos::ccs::parse_process(c.input), sos::ccs::decorate);
    if (ccs_print->parsed()) return run_print(c, sos::ccs::system(), sos::ccs::decorate);
    if (ccs_latexify->parsed()) {
      auto latex = sos::RenderStyle::latex(c.color);
      sos::ccs::decorate(latex);
      write_file(c.latex_out, sos::render_system(sos::ccs::system(), latex));
      return kOk;
    }
    if (tm_compile->parsed()) return run_print(c, sos::tm::compile(sos::tm::load_spec(c.input)), no_decoration);
    if (tm_run->parsed()) {
      auto machine = sos::tm::load_spec(c.input);
      auto verdict = sos::tm::accepts(machine, sos::tm::split_word(c.word), c.budget.value_or(100000));
      std::cout << sos::tm::verdict_name(verdict) << "\n";
      switch (verdict) {
        case sos::tm::Verdict::Accepted: return kOk;
        case sos::tm::Verdict::Rejected: return kDomainFailure;
        case sos::tm::Verdict::BudgetExhausted: return kEngineFault;
      }
    }
  } catch (const sos::NotAgnosticallySolvable& e) {
    std::cerr << "engine fault: " << e.what() << "\n";
    return kEngineFault;
  } catch (const sos::BudgetExhausted& e) {
    std::cerr << "inconclusive: " << e.what() << "\n";
    return kEngineFault;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDomainFailure;
  }
  return kUsage;
}
