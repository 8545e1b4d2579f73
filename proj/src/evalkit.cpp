// Copyright 2026 The EdgeNet Lab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "edgenet/evalkit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

namespace edgenet {

RawMetrics simulate_metrics(const Mechanism& mech, std::span<const AuctionInstance> log,
                            std::uint64_t seed, bool sampled) {
  if (log.empty()) throw std::invalid_argument("cannot simulate metrics on an empty log");
  RawMetrics m;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (const auto& inst : log) {
    const MechanismOutcome out = mech.run(inst);
    if (static_cast<int>(out.assignment.size()) != inst.k() ||
        static_cast<int>(out.payments.size()) != inst.n())
      throw std::invalid_argument("mechanism '" + mech.name() + "' returned a malformed outcome");
    m.impressions += inst.k();
    for (int j = 0; j < inst.k(); ++j) {
      const int w = out.assignment[j];
      if (w < 0) continue;
      const AdCandidate& ad = inst.candidates[w];
      const double ctr = ad.pctr * inst.slot_discounts[j];
      double clicks, orders;
      if (sampled) {
        clicks = unit(rng) < ctr ? 1.0 : 0.0;
        orders = clicks > 0.0 && unit(rng) < ad.pcvr ? 1.0 : 0.0;
      } else {
        clicks = ctr;
        orders = ctr * ad.pcvr;
      }
      m.clicks += clicks;
      m.orders += orders;
      m.revenue += clicks * out.payments[w];
    }
  }
  const double imp = static_cast<double>(m.impressions);
  m.ctr = m.clicks / imp;
  m.rpm = m.revenue / imp * 1000.0;
  m.cvr = m.orders / imp;
  return m;
}

Stat summarize(std::span<const double> xs) {
  Stat s;
  if (xs.empty()) return s;
  for (double x : xs) s.mean += x;
  s.mean /= static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return s;
}

const MetricRow& MetricTable::row(const std::string& mechanism) const {
  for (const auto& r : rows)
    if (r.mechanism == mechanism) return r;
  throw std::out_of_range("no row for mechanism '" + mechanism + "'");
}

MetricTable compare(const std::vector<MechanismFactory>& mechanisms,
                    std::span<const AuctionInstance> log, const CompareOptions& opts) {
  if (mechanisms.empty()) throw std::invalid_argument("compare needs at least one mechanism");
  if (opts.seeds.empty()) throw std::invalid_argument("compare needs at least one seed");
  if (log.empty()) throw std::invalid_argument("compare needs a non-empty log");
  std::size_t ref = 0;
  if (!opts.reference.empty()) {
    auto it = std::find_if(mechanisms.begin(), mechanisms.end(),
                           [&](const MechanismFactory& f) { return f.name == opts.reference; });
    if (it == mechanisms.end())
      throw std::invalid_argument("reference mechanism '" + opts.reference + "' is not compared");
    ref = static_cast<std::size_t>(it - mechanisms.begin());
  }
  std::span<const AuctionInstance> audit = log;
  if (opts.regret_instances > 0 && static_cast<std::size_t>(opts.regret_instances) < log.size())
    audit = log.first(static_cast<std::size_t>(opts.regret_instances));

  const std::size_t m = mechanisms.size();
  std::vector<std::vector<RawMetrics>> raw(m);
  std::vector<std::vector<double>> icr(m);
  for (std::uint64_t seed : opts.seeds) {
    for (std::size_t k = 0; k < m; ++k) {
      std::shared_ptr<Mechanism> mech = mechanisms[k].make(seed);
      raw[k].push_back(simulate_metrics(*mech, log, seed, opts.sampled));
      if (opts.with_regret) icr[k].push_back(empirical_regret(*mech, audit, opts.scheme).ic_r);
    }
  }

  MetricTable t;
  t.reference = mechanisms[ref].name;
  t.seeds = static_cast<int>(opts.seeds.size());
  for (std::size_t k = 0; k < m; ++k) {
    std::vector<double> ctr, rpm, cvr, rctr, rrpm, rcvr;
    for (std::size_t s = 0; s < opts.seeds.size(); ++s) {
      const RawMetrics& a = raw[k][s];
      const RawMetrics& r = raw[ref][s];
      auto ratio = [&](double x, double base, const char* metric) {
        if (base == 0.0)
          throw NormalizationError(std::string("reference ") + metric + " of '" + t.reference +
                                   "' is zero for seed " + std::to_string(opts.seeds[s]));
        return x / base;
      };
      ctr.push_back(ratio(a.ctr, r.ctr, "CTR"));
      rpm.push_back(ratio(a.rpm, r.rpm, "RPM"));
      cvr.push_back(ratio(a.cvr, r.cvr, "CVR"));
      rctr.push_back(a.ctr);
      rrpm.push_back(a.rpm);
      rcvr.push_back(a.cvr);
    }
    MetricRow row;
    row.mechanism = mechanisms[k].name;
    row.ctr = summarize(ctr);
    row.rpm = summarize(rpm);
    row.cvr = summarize(cvr);
    row.raw_ctr = summarize(rctr);
    row.raw_rpm = summarize(rrpm);
    row.raw_cvr = summarize(rcvr);
    if (opts.with_regret) {
      row.ic_r = summarize(icr[k]);
      row.has_ic_r = true;
    }
    // The reference row is 1 by construction; pin it against rounding.
    if (k == ref) row.ctr = row.rpm = row.cvr = Stat{1.0, 0.0};
    t.rows.push_back(std::move(row));
  }
  return t;
}

namespace {

std::string pm(const Stat& s, int prec) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.*f +- %.*f", prec, s.mean, prec, s.std);
  return buf;
}

}  // namespace

std::string format_table(const MetricTable& t) {
  std::vector<std::vector<std::string>> cells;
  cells.push_back({"Mechanism", "CTR", "RPM", "CVR", "IC-R(%)", "RPM(raw)"});
  for (const auto& r : t.rows)
    cells.push_back({r.mechanism, pm(r.ctr, 4), pm(r.rpm, 4), pm(r.cvr, 4),
                     r.has_ic_r ? pm(r.ic_r, 2) : std::string("-"), pm(r.raw_rpm, 2)});
  std::vector<std::size_t> width(cells[0].size(), 0);
  for (const auto& row : cells)
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  std::ostringstream os;
  os << "reference: " << t.reference << "  seeds: " << t.seeds << '\n';
  for (std::size_t i = 0; i < cells.size(); ++i) {
    for (std::size_t c = 0; c < cells[i].size(); ++c) {
      if (c) os << "  ";
      const std::string& s = cells[i][c];
      if (c == 0) os << s << std::string(width[c] - s.size(), ' ');
      else os << std::string(width[c] - s.size(), ' ') << s;
    }
    os << '\n';
    if (i == 0) {
      std::size_t total = 0;
      for (std::size_t w : width) total += w + 2;
      os << std::string(total - 2, '-') << '\n';
    }
  }
  return os.str();
}

std::string table_to_tsv(const MetricTable& t) {
  std::ostringstream os;
  os << "mechanism\treference\tseeds\tctr_mean\tctr_std\trpm_mean\trpm_std\tcvr_mean\tcvr_std\t"
        "icr_mean\ticr_std\traw_ctr\traw_rpm\traw_cvr\n";
  char buf[512];
  for (const auto& r : t.rows) {
    std::snprintf(buf, sizeof buf,
                  "%s\t%s\t%d\t%.9g\t%.9g\t%.9g\t%.9g\t%.9g\t%.9g\t%s\t%s\t%.9g\t%.9g\t%.9g\n",
                  r.mechanism.c_str(), t.reference.c_str(), t.seeds, r.ctr.mean, r.ctr.std,
                  r.rpm.mean, r.rpm.std, r.cvr.mean, r.cvr.std,
                  r.has_ic_r ? std::to_string(r.ic_r.mean).c_str() : "nan",
                  r.has_ic_r ? std::to_string(r.ic_r.std).c_str() : "nan", r.raw_ctr.mean,
                  r.raw_rpm.mean, r.raw_cvr.mean);
    os << buf;
  }
  return os.str();
}

namespace {

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string table_to_svg(const MetricTable& t) {
  struct Panel {
    const char* title;
    Stat MetricRow::*field;
  };
  const Panel panels[] = {{"CTR (normalized)", &MetricRow::ctr},
                          {"RPM (normalized)", &MetricRow::rpm},
                          {"CVR (normalized)", &MetricRow::cvr},
                          {"IC-R (%)", &MetricRow::ic_r}};
  const int pw = 260, ph = 220, pad = 30;
  const int width = 4 * pw + 5 * pad;
  const int height = ph + 2 * pad + 40;
  const char* colors[] = {"#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#76b7b2", "#b07aa1"};
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  char buf[256];
  for (int p = 0; p < 4; ++p) {
    const int x0 = pad + p * (pw + pad);
    const int y0 = pad;
    os << "<text x=\"" << x0 + pw / 2 << "\" y=\"" << y0 - 10
       << "\" text-anchor=\"middle\" font-size=\"13\">" << panels[p].title << "</text>\n";
    double top = 0.0;
    for (const auto& r : t.rows) {
      const Stat& s = r.*panels[p].field;
      top = std::max(top, s.mean + s.std);
    }
    if (!(top > 0.0)) top = 1.0;
    os << "<line x1=\"" << x0 << "\" y1=\"" << y0 + ph << "\" x2=\"" << x0 + pw << "\" y2=\""
       << y0 + ph << "\" stroke=\"black\"/>\n";
    const double bw = static_cast<double>(pw) / std::max<std::size_t>(1, t.rows.size());
    for (std::size_t k = 0; k < t.rows.size(); ++k) {
      const Stat& s = t.rows[k].*panels[p].field;
      const double h = std::max(0.0, s.mean) / top * (ph - 20);
      const double x = x0 + k * bw + 0.15 * bw;
      std::snprintf(buf, sizeof buf,
                    "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" fill=\"%s\"/>\n",
                    x, y0 + ph - h, 0.7 * bw, h, colors[k % 6]);
      os << buf;
      const double eh = s.std / top * (ph - 20);
      const double cx = x + 0.35 * bw;
      std::snprintf(buf, sizeof buf,
                    "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n", cx,
                    y0 + ph - h - eh, cx, y0 + ph - h + eh);
      os << buf;
      std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">%.3g</text>\n",
                    cx, y0 + ph - h - eh - 4, s.mean);
      os << buf;
      std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%d\" text-anchor=\"middle\">", cx,
                    y0 + ph + 14);
      os << buf << xml_escape(t.rows[k].mechanism) << "</text>\n";
    }
  }
  os << "<text x=\"" << pad << "\" y=\"" << height - 10 << "\">reference: "
     << xml_escape(t.reference) << ", seeds: " << t.seeds << ", bars show mean, whiskers +- std</text>\n";
  os << "</svg>\n";
  return os.str();
}

}  // namespace edgenet
