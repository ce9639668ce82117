from .selection import DegenerateData, anchor_count, select_anchors
from .graph import AnchorConfig, AnchorGraph, TiedDistanceDegenerate, build_anchor_graph, \
    stack_anchor_tensor, align_anchor_graphs, resolve_sizes, select_view_anchors, \
    build_view_graphs, build_anchor_tensor
