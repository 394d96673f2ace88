#include "msgclass/balance.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "msgclass/error.hpp"
#include "msgclass/random.hpp"

namespace msgclass {

namespace {

// Exact pairwise distances for small row sets; the Gram form is used only to
// narrow candidates on large inputs.
double squared_distance(const Matrix& x, Index a, Index b) { return (x.row(a) - x.row(b)).squaredNorm(); }

std::vector<Index> nearest_neighbors(const Matrix& x, std::span<const Index> active) {
  const Index n = static_cast<Index>(active.size());
  std::vector<Index> nn(active.size(), -1);
  constexpr Index kBlock = 256;
  Matrix sub(n, x.cols());
  for (Index i = 0; i < n; ++i) sub.row(i) = x.row(active[i]);
  for (Index start = 0; start < n; start += kBlock) {
    const Index len = std::min(kBlock, n - start);
    const Matrix d = squared_distances(sub.middleRows(start, len), sub);
    for (Index r = 0; r < len; ++r) {
      const Index i = start + r;
      double best = std::numeric_limits<double>::infinity();
      Index arg = -1;
      for (Index j = 0; j < n; ++j) {
        if (j == i) continue;
        // Recheck near-ties exactly so ties resolve to the lowest index.
        double dij = d(r, j);
        if (dij <= best + 1e-9 * (1.0 + best)) {
          dij = squared_distance(x, active[i], active[j]);
          if (dij < best) {
            best = dij;
            arg = j;
          }
        }
      }
      nn[i] = arg;
    }
  }
  return nn;
}

}  // namespace

SmoteResult smote(const Matrix& features, std::span<const int> labels, const ResamplePlan& plan) {
  if (plan.k_neighbors < 1) throw ConfigError("smote: k_neighbors must be at least 1");
  if (static_cast<Index>(labels.size()) != features.rows()) throw DataError("smote: label count does not match rows");
  int n_classes = 0;
  for (int y : labels) n_classes = std::max(n_classes, y + 1);
  std::vector<std::vector<Index>> members(n_classes);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0) throw DataError("smote: unlabeled row");
    members[labels[i]].push_back(static_cast<Index>(i));
  }
  std::size_t majority = 0;
  for (const auto& m : members) majority = std::max(majority, m.size());

  Rng rng(plan.seed);
  std::vector<RowVector> rows;
  SmoteResult out;
  out.labels.assign(labels.begin(), labels.end());
  out.synthetic.assign(labels.size(), false);

  for (int c = 0; c < n_classes; ++c) {
    const auto& idx = members[c];
    if (idx.empty()) continue;
    auto target_it = plan.targets.find(c);
    const std::size_t target = target_it != plan.targets.end() ? static_cast<std::size_t>(target_it->second) : majority;
    if (target < idx.size()) throw ConfigError("smote: target for class " + std::to_string(c) + " is below its count");
    const std::size_t need = target - idx.size();
    if (need == 0) continue;
    if (idx.size() < 2)
      throw DataError("smote: class " + std::to_string(c) + " has a single instance and cannot be interpolated");

    // k nearest same-class neighbors per member, ties by lower index.
    const Index k = std::min<Index>(plan.k_neighbors, static_cast<Index>(idx.size()) - 1);
    Matrix sub(static_cast<Index>(idx.size()), features.cols());
    for (std::size_t i = 0; i < idx.size(); ++i) sub.row(static_cast<Index>(i)) = features.row(idx[i]);
    std::vector<std::vector<Index>> neighbors(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
      std::vector<std::pair<double, Index>> d;
      d.reserve(idx.size() - 1);
      for (std::size_t j = 0; j < idx.size(); ++j)
        if (j != i) d.emplace_back((sub.row(i) - sub.row(j)).squaredNorm(), static_cast<Index>(j));
      std::partial_sort(d.begin(), d.begin() + k, d.end());
      for (Index t = 0; t < k; ++t) neighbors[i].push_back(d[t].second);
    }
    for (std::size_t s = 0; s < need; ++s) {
      const std::size_t base = rng.index(idx.size());
      const Index nb = neighbors[base][rng.index(static_cast<std::size_t>(k))];
      const double u = rng.uniform();
      rows.push_back(sub.row(base) + u * (sub.row(nb) - sub.row(base)));
      out.labels.push_back(c);
      out.synthetic.push_back(true);
      out.origins.push_back({idx[base], idx[nb], u});
    }
  }
  out.features.resize(features.rows() + static_cast<Index>(rows.size()), features.cols());
  out.features.topRows(features.rows()) = features;
  for (std::size_t i = 0; i < rows.size(); ++i) out.features.row(features.rows() + static_cast<Index>(i)) = rows[i];
  return out;
}

std::vector<std::pair<Index, Index>> tomek_links(const Matrix& features, std::span<const int> labels) {
  std::vector<Index> active(static_cast<std::size_t>(features.rows()));
  std::iota(active.begin(), active.end(), Index{0});
  std::vector<std::pair<Index, Index>> links;
  if (active.size() < 2) return links;
  const auto nn = nearest_neighbors(features, active);
  for (std::size_t a = 0; a < nn.size(); ++a) {
    const Index b = nn[a];
    if (b > static_cast<Index>(a) && nn[b] == static_cast<Index>(a) && labels[a] != labels[b])
      links.emplace_back(static_cast<Index>(a), b);
  }
  return links;
}

ResampleResult smote_tomek(const Matrix& features, std::span<const int> labels, const ResamplePlan& plan) {
  auto sm = smote(features, labels, plan);
  int n_classes = 0;
  for (int y : sm.labels) n_classes = std::max(n_classes, y + 1);
  std::vector<std::size_t> freq(n_classes, 0);
  for (int y : sm.labels) ++freq[y];

  std::vector<Index> active(static_cast<std::size_t>(sm.features.rows()));
  std::iota(active.begin(), active.end(), Index{0});
  std::size_t removed = 0;
  while (active.size() >= 2) {
    const auto nn = nearest_neighbors(sm.features, active);
    std::vector<bool> drop(active.size(), false);
    bool any = false;
    for (std::size_t a = 0; a < nn.size(); ++a) {
      const auto b = static_cast<std::size_t>(nn[a]);
      if (b <= a || nn[b] != static_cast<Index>(a)) continue;
      const int la = sm.labels[active[a]];
      const int lb = sm.labels[active[b]];
      if (la == lb) continue;
      any = true;
      if (freq[la] >= freq[lb]) drop[a] = true;
      if (freq[lb] >= freq[la]) drop[b] = true;
    }
    if (!any) break;
    std::vector<Index> next;
    for (std::size_t i = 0; i < active.size(); ++i) {
      if (drop[i]) ++removed;
      else next.push_back(active[i]);
    }
    active = std::move(next);
  }

  ResampleResult out;
  out.kept = active;
  out.removed = removed;
  out.features.resize(static_cast<Index>(active.size()), sm.features.cols());
  for (std::size_t i = 0; i < active.size(); ++i) {
    out.features.row(static_cast<Index>(i)) = sm.features.row(active[i]);
    out.labels.push_back(sm.labels[active[i]]);
    out.synthetic.push_back(sm.synthetic[active[i]]);
  }
  return out;
}

}  // namespace msgclass
