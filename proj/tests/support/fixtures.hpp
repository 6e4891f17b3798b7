#pragma once

#include <burnout/dataset.hpp>
#include <burnout/matrix.hpp>
#include <burnout/rng.hpp>

#include <optional>
#include <string>
#include <vector>

namespace fixtures {

inline burnout::data::EmployeeRecord record(int designation, std::optional<int> resource,
                                            std::optional<double> fatigue, std::optional<double> burn,
                                            burnout::data::Gender g = burnout::data::Gender::Female,
                                            burnout::data::CompanyType c = burnout::data::CompanyType::Service,
                                            burnout::data::WfhSetup w = burnout::data::WfhSetup::Yes) {
  using namespace std::chrono;
  burnout::data::EmployeeRecord r;
  r.employee_id = "e" + std::to_string(designation);
  r.date_of_joining = year{2008} / month{3} / day{14};
  r.gender = g;
  r.company_type = c;
  r.wfh_setup = w;
  r.designation = designation;
  r.resource_allocation = resource;
  r.mental_fatigue_score = fatigue;
  r.burn_rate = burn;
  return r;
}

inline burnout::Matrix random_matrix(burnout::Rng& rng, std::size_t n, std::size_t d, double lo = -1.0,
                                     double hi = 1.0) {
  burnout::Matrix m(n, d);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < d; ++c) m(r, c) = lo + (hi - lo) * rng.uniform();
  return m;
}

inline std::vector<std::vector<double>> to_rows(const burnout::Matrix& m) {
  std::vector<std::vector<double>> rows;
  for (std::size_t r = 0; r < m.rows(); ++r) rows.emplace_back(m.row(r).begin(), m.row(r).end());
  return rows;
}

}  // namespace fixtures
