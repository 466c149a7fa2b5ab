"""Graphs, hop distances, widths and honest truncation."""

# %% Imports

from inflap import Graph, TruncationLimited, ball, diameter, distance, width_of
from inflap.graph import grid_graph, path_graph

# %% A 5x5 grid: hop distance is the l1 distance between cells
G = grid_graph(5, 5)
print("d(corner, corner) =", distance(G, 0, 24))
print("diameter =", diameter(G, G.ids))
print("open ball {d < 2} around the center has", len(ball(G, 12, 2)), "vertices")

# %% Width of an interior set: the largest distance from an interior vertex to the boundary
interior = [v for v in G.ids if 0 < v % 5 < 4 and 0 < v // 5 < 4]
print("width of the 3x3 interior =", width_of(G, interior))

# %% Vertices 2 and 5 may have unexplored edges, so d(0, 5) is only bounded below
P = path_graph(6)
T = Graph(P.ids, P.edge_array(), complete={2: False, 5: False})
d = distance(T, 0, 5)
print("on the truncated path, d(0, 5) is", d)
if isinstance(d, TruncationLimited):
    print("  certified bounds:", "exposed", d.value, "lower bound", d.lower_bound)
