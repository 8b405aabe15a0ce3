#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "../data/csv.hpp"
#include "../error.hpp"
#include "dbn.hpp"
#include "inference.hpp"

namespace tsdbn {

inline std::vector<std::string> default_mobility_variables() {
  return {"Flights 7-day moving average",
          "OpenTable restaurant bookings London index",
          "Google homeworking Greater London mobility index",
          "Google workplace Greater London mobility index",
          "Apple walking London mobility index",
          "Google parks Greater London mobility index",
          "Google retail recreation Greater London mobility index",
          "Google grocery pharmacy Greater London mobility index",
          "Google transit stations mobility index",
          "TfL Tube mobility index",
          "TfL Bus mobility index",
          "Citymapper journeys mobility index"};
}

inline std::vector<std::string> default_infection_variables() { return {"New cases", "New infections", "Reinfections"}; }

struct PolicyRow {
  std::string intervention;
  std::string outcome;
  bool identified = false;
  bool matches = false;  // identified and ACE < 0
  AceResult ace;         // only filled when identified
};

struct PolicyReport {
  std::vector<PolicyRow> rows;
  std::size_t identified = 0;
  std::size_t matches = 0;

  std::string to_csv() const {
    std::string out = "intervention,outcome,identified,ace,standard_error,p_state1,p_state2,p_state3,matches\n";
    for (const auto& r : rows) {
      out += detail::quote_csv(r.intervention) + "," + detail::quote_csv(r.outcome) + "," + (r.identified ? "1" : "0") + ",";
      if (r.identified) {
        out += format_number(r.ace.ace) + "," + format_number(r.ace.standard_error);
        for (std::size_t s = 0; s < 3; ++s)
          out += "," + (s < r.ace.probabilities.size() ? format_number(r.ace.probabilities[s]) : std::string());
      } else {
        out += ",,,,";
      }
      out += std::string(",") + (r.matches ? "1" : "0") + "\n";
    }
    return out;
  }
};

// An effect X -> Y is identified when the two-slice graph has a directed path
// from X's lagged node to Y's current node; its direction matches when the
// ACE is negative. Query indices follow the (intervention, outcome) order.
inline PolicyReport policy_eval(const Dbn& dbn, const std::vector<std::string>& interventions,
                                const std::vector<std::string>& outcomes, std::size_t n_samples, std::uint64_t seed) {
  for (const auto& x : interventions)
    if (!dbn.graph.find(lagged_name(x))) throw DataError("policy variable '" + x + "' is not in the network");
  for (const auto& y : outcomes)
    if (!dbn.graph.find(y)) throw DataError("policy outcome '" + y + "' is not in the network");
  PolicyReport rep;
  std::uint64_t query = 0;
  for (const auto& x : interventions)
    for (const auto& y : outcomes) {
      PolicyRow row;
      row.intervention = x;
      row.outcome = y;
      const auto xn = dbn.graph.index(lagged_name(x));
      const auto yn = dbn.graph.index(y);
      row.identified = xn != yn && dbn.graph.reaches(xn, yn);
      if (row.identified) {
        row.ace = ace(dbn, xn, yn, n_samples, seed, query);
        row.matches = row.ace.ace < 0.0;
        ++rep.identified;
        rep.matches += row.matches;
      }
      ++query;
      rep.rows.push_back(std::move(row));
    }
  return rep;
}

}  // namespace tsdbn
