#include "ttno/error.hpp"
#include "ttno/symbolic.hpp"

#include <json.hpp>

#include <set>

namespace ttno {

using nlohmann::json;

namespace {

[[noreturn]] void parse_fail(const std::string &where, const std::string &msg) {
  throw Error(ErrorCode::ParseError, where + ": " + msg);
}

std::size_t line_of(const std::string &text, std::size_t byte) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i)
    if (text[i] == '\n')
      ++line;
  return line;
}

mpz_class read_integer(const json &j, const std::string &where) {
  if (j.is_number_integer())
    return mpz_class(std::to_string(j.get<long long>()));
  if (j.is_string()) {
    mpz_class z;
    if (z.set_str(j.get<std::string>(), 10) != 0)
      parse_fail(where, "not an integer");
    return z;
  }
  parse_fail(where, "expected integer");
}

json write_integer(const mpz_class &z) {
  if (z.fits_slong_p())
    return json(z.get_si());
  return json(z.get_str());
}

int read_site_id(const std::string &key, const std::string &where) {
  try {
    std::size_t pos = 0;
    int id = std::stoi(key, &pos);
    if (pos != key.size())
      throw std::invalid_argument(key);
    return id;
  } catch (const std::exception &) {
    parse_fail(where, "site id '" + key + "' is not an integer");
  }
}

Complex read_complex(const json &j, const std::string &where) {
  if (j.is_number())
    return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  parse_fail(where, "expected number or [re, im]");
}

json write_complex(Complex v) {
  if (v.imag() == 0.0)
    return json(v.real());
  return json::array({v.real(), v.imag()});
}

// Raw duplicate keys are invisible after parsing, so they are caught here.
struct DuplicateKeyTracker {
  struct Frame {
    std::string owner;
    std::set<std::string> keys;
  };
  std::vector<Frame> stack;
  std::string last_key;
  std::string dup_owner, dup_key;

  bool operator()(int, json::parse_event_t event, json &parsed) {
    switch (event) {
    case json::parse_event_t::object_start:
      stack.push_back({last_key, {}});
      last_key.clear();
      break;
    case json::parse_event_t::object_end:
      if (!stack.empty())
        stack.pop_back();
      break;
    case json::parse_event_t::key: {
      last_key = parsed.get<std::string>();
      if (!stack.empty() && !stack.back().keys.insert(last_key).second &&
          dup_key.empty()) {
        dup_owner = stack.back().owner;
        dup_key = last_key;
      }
      break;
    }
    default:
      break;
    }
    return true;
  }
};

} // namespace

SymbolicOperator parse_operator(const std::string &text) {
  DuplicateKeyTracker tracker;
  json doc;
  try {
    doc = json::parse(text, [&](int d, json::parse_event_t e, json &p) {
      return tracker(d, e, p);
    });
  } catch (const json::parse_error &e) {
    parse_fail("line " + std::to_string(line_of(text, e.byte)), e.what());
  }
  if (!tracker.dup_key.empty()) {
    if (tracker.dup_owner == "ops")
      throw Error(ErrorCode::DuplicateFactor, "site " + tracker.dup_key);
    parse_fail("key '" + tracker.dup_key + "'", "duplicate key");
  }
  if (!doc.is_object())
    parse_fail("document", "expected an object");

  SymbolicOperator op;
  if (!doc.contains("sites") || !doc["sites"].is_array())
    parse_fail("sites", "missing or not an array");
  std::set<int> seen;
  for (std::size_t i = 0; i < doc["sites"].size(); ++i) {
    const auto &s = doc["sites"][i];
    std::string where = "sites[" + std::to_string(i) + "]";
    if (!s.is_object() || !s.contains("id"))
      parse_fail(where, "expected {id, dim}");
    Site site;
    site.id = s["id"].is_string() ? read_site_id(s["id"], where)
                                  : static_cast<int>(read_integer(s["id"], where).get_si());
    site.dim = s.contains("dim") ? static_cast<int>(read_integer(s["dim"], where).get_si()) : 2;
    if (site.dim < 1)
      parse_fail(where, "dim must be >= 1");
    if (!seen.insert(site.id).second)
      parse_fail(where, "duplicate site id " + std::to_string(site.id));
    op.sites.push_back(site);
  }

  if (doc.contains("symbols")) {
    if (!doc["symbols"].is_array())
      parse_fail("symbols", "expected an array");
    for (std::size_t i = 0; i < doc["symbols"].size(); ++i) {
      const auto &s = doc["symbols"][i];
      std::string where = "symbols[" + std::to_string(i) + "]";
      std::string name;
      if (s.is_string()) {
        name = s.get<std::string>();
      } else if (s.is_object() && s.contains("name") && s["name"].is_string()) {
        name = s["name"].get<std::string>();
      } else {
        parse_fail(where, "expected a name or {name, value}");
      }
      if (!valid_symbol_name(name))
        parse_fail(where, "invalid symbol name '" + name + "'");
      op.symbols.declare(name);
      if (s.is_object() && s.contains("value") && !s["value"].is_null())
        op.symbols.assign(name, read_complex(s["value"], where + ".value"));
    }
  }

  if (!doc.contains("terms") || !doc["terms"].is_array())
    parse_fail("terms", "missing or not an array");
  for (std::size_t i = 0; i < doc["terms"].size(); ++i) {
    const auto &t = doc["terms"][i];
    std::string where = "terms[" + std::to_string(i) + "]";
    if (!t.is_object())
      parse_fail(where, "expected an object");
    mpz_class num = 1, den = 1;
    std::string sym = "1";
    if (t.contains("coeff")) {
      const auto &c = t["coeff"];
      if (!c.is_object())
        parse_fail(where + ".coeff", "expected {num, den, symbol}");
      if (c.contains("num"))
        num = read_integer(c["num"], where + ".coeff.num");
      if (c.contains("den"))
        den = read_integer(c["den"], where + ".coeff.den");
      if (c.contains("symbol")) {
        if (!c["symbol"].is_string())
          parse_fail(where + ".coeff.symbol", "expected a string");
        sym = c["symbol"].get<std::string>();
      }
    }
    if (den == 0)
      parse_fail(where + ".coeff.den", "zero denominator");
    if (sym != "1" && !valid_symbol_name(sym))
      parse_fail(where + ".coeff.symbol", "invalid symbol name '" + sym + "'");
    op.symbols.declare(sym);
    ProductTerm term;
    term.coefficient = Coefficient(Rational(num, den), Symbol::named(sym));
    if (t.contains("ops")) {
      const auto &ops = t["ops"];
      if (!ops.is_object())
        parse_fail(where + ".ops", "expected an object");
      for (auto it = ops.begin(); it != ops.end(); ++it) {
        int id = read_site_id(it.key(), where + ".ops");
        if (!it.value().is_string())
          parse_fail(where + ".ops." + it.key(), "label must be a string");
        std::string label = it.value().get<std::string>();
        if (label.empty())
          parse_fail(where + ".ops." + it.key(), "empty label");
        if (!seen.count(id))
          throw Error(ErrorCode::UnknownSite,
                      where + ": site " + std::to_string(id));
        if (term.factors.count(id))
          throw Error(ErrorCode::DuplicateFactor,
                      where + ": site " + std::to_string(id));
        if (label != kIdentity)
          term.factors[id] = label;
      }
    }
    if (!term.coefficient.is_zero())
      op.terms.push_back(std::move(term));
  }

  if (doc.contains("operator_library")) {
    const auto &lib = doc["operator_library"];
    if (!lib.is_object())
      parse_fail("operator_library", "expected an object");
    for (auto it = lib.begin(); it != lib.end(); ++it) {
      std::string where = "operator_library." + it.key();
      const auto &rows = it.value();
      if (!rows.is_array() || rows.empty())
        parse_fail(where, "expected rows of [re, im]");
      auto n = static_cast<Eigen::Index>(rows.size());
      Eigen::MatrixXcd m(n, n);
      for (Eigen::Index r = 0; r < n; ++r) {
        const auto &row = rows[r];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n)
          parse_fail(where, "matrix must be square");
        for (Eigen::Index c = 0; c < n; ++c)
          m(r, c) = read_complex(row[c], where);
      }
      op.operator_library[it.key()] = m;
    }
  }
  return op;
}

std::string serialize_operator(const SymbolicOperator &op) {
  json doc;
  doc["sites"] = json::array();
  for (const auto &s : op.sites)
    doc["sites"].push_back({{"id", s.id}, {"dim", s.dim}});
  doc["symbols"] = json::array();
  for (const auto &[name, value] : op.symbols.entries()) {
    json s = {{"name", name}};
    if (value)
      s["value"] = write_complex(*value);
    doc["symbols"].push_back(s);
  }
  doc["terms"] = json::array();
  for (const auto &t : op.terms) {
    json ops = json::object();
    for (const auto &[site, label] : t.factors)
      ops[std::to_string(site)] = label;
    const auto &q = t.coefficient.rational();
    doc["terms"].push_back(
        {{"coeff",
          {{"num", write_integer(q.get_num())},
           {"den", write_integer(q.get_den())},
           {"symbol", t.coefficient.symbol().name()}}},
         {"ops", ops}});
  }
  if (!op.operator_library.empty()) {
    json lib = json::object();
    for (const auto &[label, m] : op.operator_library) {
      json rows = json::array();
      for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c)
          row.push_back(json::array({m(r, c).real(), m(r, c).imag()}));
        rows.push_back(row);
      }
      lib[label] = rows;
    }
    doc["operator_library"] = lib;
  }
  return doc.dump(2) + "\n";
}

} // namespace ttno
