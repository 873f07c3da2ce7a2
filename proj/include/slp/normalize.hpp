#pragma once

#include "slp/ast_ops.hpp"
#include "slp/pure.hpp"

namespace slp {

// Footprint of a spatial term as a label term, when every leaf is labeled:
// @l k contributes l, * composes with o, (+) with ow; scaling is dropped
// (it never changes a region's domain). Emp leaves are skipped.
std::optional<LabelTerm> footprint_label(const Spatial& s);

struct RewriteResult {
  Spatial spatial;
  std::vector<PureAtom> emitted;  // side facts the rewrites rely on
};

// Pushes permission scales through groups and peels group labels, emitting
// the label-composition facts this exposes. The `rhs` variant restricts
// itself to the equivalences (no scale distribution over (+), no collapsing
// of nested scales), so it can be used on the goal side of an entailment.
RewriteResult push_scale_inward(const Spatial& s, const PureCtx& ctx);
RewriteResult push_scale_inward_rhs(const Spatial& s, const PureCtx& ctx);

// Weak-to-strong recovery: joins equal-label parts shared between weak
// groups (when the resulting share is provably defined) and upgrades (+) to *
// between groups with provably disjoint footprints. Result is equivalent to
// the input under the heap's own pure part.
SymbolicHeap strengthen_separation(const SymbolicHeap& sh);

}  // namespace slp
