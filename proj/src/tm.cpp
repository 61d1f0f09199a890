#include "sos/tm.hpp"

#include <fstream>
#include <sstream>

namespace sos::tm {

namespace {

const Term kCons = Term::symbol("::");

bool reserved(const std::string& s) { return s == "::" || s == "nil"; }

std::string trim(std::string_view s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  std::size_t e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::string item;
  for (char c : s) {
    if (c == ',' || c == ' ' || c == '\t') {
      if (!item.empty()) out.push_back(std::move(item));
      item.clear();
    } else {
      item += c;
    }
  }
  if (!item.empty()) out.push_back(std::move(item));
  return out;
}

Action parse_delta(std::size_t line, std::string_view body, std::pair<std::string, std::string>& key) {
  auto arrow = body.find("->");
  if (arrow == std::string_view::npos) throw SpecError(line, "delta needs 'q,y -> q',y',L|R'");
  auto lhs = split_list(body.substr(0, arrow));
  auto rhs = split_list(body.substr(arrow + 2));
  if (lhs.size() != 2) throw SpecError(line, "delta source must be 'state,symbol'");
  if (rhs.size() != 3) throw SpecError(line, "delta target must be 'state,symbol,L|R'");
  Move move;
  if (rhs[2] == "L")
    move = Move::Left;
  else if (rhs[2] == "R")
    move = Move::Right;
  else
    throw SpecError(line, "move must be L or R, got '" + rhs[2] + "'");
  key = {lhs[0], lhs[1]};
  return {rhs[0], rhs[1], move};
}

}  // namespace

void TuringMachine::validate() const {
  auto fail = [](const std::string& m) { throw std::invalid_argument(m); };
  if (states.empty()) fail("no states");
  if (tape_alphabet.empty()) fail("empty tape alphabet");
  if (!tape_alphabet.count(blank)) fail("blank '" + blank + "' is not in the tape alphabet");
  if (input_alphabet.empty()) fail("empty input alphabet");
  for (const auto& s : input_alphabet) {
    if (!tape_alphabet.count(s)) fail("input symbol '" + s + "' is not in the tape alphabet");
    if (s == blank) fail("the blank cannot be an input symbol");
  }
  if (!states.count(initial)) fail("initial state '" + initial + "' is not a state");
  for (const auto& q : accepting)
    if (!states.count(q)) fail("accepting state '" + q + "' is not a state");
  for (const auto& s : states)
    if (reserved(s)) fail("state '" + s + "' uses a reserved symbol");
  for (const auto& s : tape_alphabet)
    if (reserved(s)) fail("tape symbol '" + s + "' uses a reserved symbol");
  for (const auto& [key, act] : delta) {
    const auto& [q, y] = key;
    if (!states.count(q) || !states.count(act.state)) fail("transition on unknown state");
    if (!tape_alphabet.count(y) || !tape_alphabet.count(act.write)) fail("transition on unknown tape symbol");
    if (accepting.count(q)) fail("accepting state '" + q + "' has an outgoing transition");
  }
}

TuringMachine parse_spec(std::string_view text) {
  TuringMachine tm;
  std::set<std::string> seen;
  std::istringstream in{std::string(text)};
  std::size_t line_no = 0;
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    std::string line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    auto colon = line.find(':');
    if (colon == std::string::npos) throw SpecError(line_no, "expected 'key: value'");
    std::string key = trim(line.substr(0, colon));
    std::string body = line.substr(colon + 1);
    if (key == "delta") {
      std::pair<std::string, std::string> k;
      Action a = parse_delta(line_no, body, k);
      if (!tm.delta.emplace(k, a).second) throw SpecError(line_no, "duplicate transition for " + k.first + "," + k.second);
      continue;
    }
    if (!seen.insert(key).second) throw SpecError(line_no, "duplicate header '" + key + "'");
    auto items = split_list(body);
    auto single = [&]() {
      if (items.size() != 1) throw SpecError(line_no, "'" + key + "' takes exactly one value");
      return items[0];
    };
    if (key == "states")
      tm.states.insert(items.begin(), items.end());
    else if (key == "input")
      tm.input_alphabet.insert(items.begin(), items.end());
    else if (key == "tape")
      tm.tape_alphabet.insert(items.begin(), items.end());
    else if (key == "blank")
      tm.blank = single();
    else if (key == "initial")
      tm.initial = single();
    else if (key == "accept")
      tm.accepting.insert(items.begin(), items.end());
    else
      throw SpecError(line_no, "unknown header '" + key + "'");
  }
  for (const char* required : {"states", "input", "tape", "blank", "initial"})
    if (!seen.count(required)) throw SpecError(line_no, std::string("missing '") + required + "' header");
  try {
    tm.validate();
  } catch (const std::invalid_argument& e) {
    throw SpecError(line_no, e.what());
  }
  return tm;
}

TuringMachine load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_spec(buf.str());
}

Term nil() { return Term::symbol("nil"); }
Term push(const Term& stack, const Term& top) { return Term::sequence({stack, kCons, top}); }

Term configuration(const Term& state, const Term& left, const Term& current, const Term& right) {
  return Term::sequence({state, kCons, left, kCons, current, kCons, right});
}

System compile(const TuringMachine& tm) {
  tm.validate();
  Term xs = Term::fresh_variable("xs");
  Term x = Term::fresh_variable("x");
  Term y = Term::fresh_variable("y");
  Term z = Term::fresh_variable("z");
  Term zs = Term::fresh_variable("zs");
  auto sym = [](const std::string& s) { return Term::symbol(s); };

  System s("tm");
  for (const auto& [key, act] : tm.delta) {
    const auto& [q, read] = key;
    std::string tag = "[" + q + "," + read + "]";
    if (act.move == Move::Left) {
      s.add(Rule("left" + tag, {configuration(sym(act.state), xs, x, push(zs, sym(act.write)))},
                 configuration(sym(q), push(xs, x), sym(read), zs)));
    } else {
      s.add(Rule("right" + tag, {configuration(sym(act.state), push(xs, sym(act.write)), z, zs)},
                 configuration(sym(q), xs, sym(read), push(zs, z))));
      s.add(Rule("extend" + tag, {configuration(sym(act.state), push(xs, sym(act.write)), sym(tm.blank), nil())},
                 configuration(sym(q), xs, sym(read), nil())));
    }
  }
  for (const auto& qf : tm.accepting) s.add(Rule("halt[" + qf + "]", {}, configuration(sym(qf), xs, y, zs)));
  s.add(Rule("input", {configuration(sym(tm.initial), nil(), x, xs)}, push(xs, x)));
  s.add(Rule("empty", {configuration(sym(tm.initial), nil(), sym(tm.blank), nil())}, nil()));
  return s;
}

Term encode_input(const TuringMachine& tm, const std::vector<std::string>& word) {
  Term stack = nil();
  for (auto it = word.rbegin(); it != word.rend(); ++it) {
    if (!tm.input_alphabet.count(*it)) throw std::invalid_argument("'" + *it + "' is not an input symbol");
    stack = push(stack, Term::symbol(*it));
  }
  return stack;
}

std::vector<std::string> split_word(std::string_view text) {
  if (text.find_first_of(", ") != std::string_view::npos) return split_list(text);
  std::vector<std::string> out;
  for (char c : text) out.emplace_back(1, c);
  return out;
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Accepted: return "accepted";
    case Verdict::Rejected: return "rejected";
    case Verdict::BudgetExhausted: return "inconclusive (budget exhausted)";
  }
  return "?";
}

Verdict accepts(const System& compiled, const TuringMachine& tm, const std::vector<std::string>& word,
                std::size_t budget) {
  EngineOptions options;
  options.step_budget = budget;
  auto stream = iter_answers(compiled, encode_input(tm, word), std::move(options));
  if (stream.next()) return Verdict::Accepted;
  return stream.status() == AnswerStream::Status::BudgetExhausted ? Verdict::BudgetExhausted : Verdict::Rejected;
}

Verdict accepts(const TuringMachine& tm, const std::vector<std::string>& word, std::size_t budget) {
  return accepts(compile(tm), tm, word, budget);
}

}  // namespace sos::tm
