// SPDX-License-Identifier: Apache-2.0
#include <hapnet/errors.hpp>
#include <hapnet/nn/layers.hpp>
#include <hapnet/visual/features.hpp>

#include <array>

namespace hapnet::visual {

VisualFeature pool_normalize(const VisualFeatureMap &featmap) {
  if (featmap.grid.rank() != 3)
    throw InvalidInput("pool_normalize: feature map must be [H, W, C], got " +
                       nn::shape_string(featmap.grid.shape()));
  if (!featmap.grid.all_finite())
    throw InvalidInput("pool_normalize: non-finite activations for object " +
                       featmap.object_id);
  auto n = nn::l2_normalize(nn::avg_pool(featmap.grid));
  return {featmap.object_id, n.value.vector(), n.degenerate};
}

VisualFeature combine_views(
    std::span<const std::pair<std::size_t, VisualFeature>> features) {
  std::array<const VisualFeature *, kViews> slots{};
  for (const auto &[view, feat] : features) {
    if (view >= kViews)
      throw InvalidInput("combine_views: view index " + std::to_string(view) +
                         " out of range");
    if (slots[view])
      throw InvalidInput("combine_views: duplicate view " +
                         std::to_string(view));
    slots[view] = &feat;
  }
  for (std::size_t v = 0; v < kViews; ++v)
    if (!slots[v])
      throw InvalidInput("combine_views: missing view " + std::to_string(v));

  VisualFeature out;
  out.object_id = slots[0]->object_id;
  const std::size_t c = slots[0]->values.size();
  for (const VisualFeature *f : slots) {
    if (f->object_id != out.object_id)
      throw InvalidInput("combine_views: views of different objects (" +
                         out.object_id + ", " + f->object_id + ")");
    if (f->values.size() != c)
      throw InvalidInput("combine_views: view lengths differ");
    out.values.insert(out.values.end(), f->values.begin(), f->values.end());
    out.degenerate = out.degenerate || f->degenerate;
  }
  return out;
}

} // namespace hapnet::visual
