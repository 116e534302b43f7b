use crate::components::{embed_edges, MetricEdge};
use crate::error::Result;
use crate::forest::SteinerForest;
use crate::graph::{StpInstance, VertexId, INFINITE_COST};
use crate::metric::MetricClosure;

/// Minimum spanning tree of the terminals in the metric closure, embedded
/// into `G` and pruned. Costs at most twice the optimum.
pub fn two_approx(inst: &StpInstance, metric: &MetricClosure) -> Result<SteinerForest> {
    let terms = inst.terminals();
    let mut in_tree = vec![false; terms.len()];
    let mut key = vec![INFINITE_COST; terms.len()];
    let mut link: Vec<VertexId> = terms.to_vec();
    key[0] = 0;
    let mut edges = Vec::with_capacity(terms.len().saturating_sub(1));
    for _ in 0..terms.len() {
        let i = (0..terms.len())
            .filter(|&i| !in_tree[i])
            .min_by_key(|&i| (key[i], i))
            .expect("a terminal is left");
        in_tree[i] = true;
        if link[i] != terms[i] {
            edges.push(MetricEdge::in_metric(link[i], terms[i], metric));
        }
        for j in 0..terms.len() {
            let d = metric.dist(terms[i], terms[j]);
            if !in_tree[j] && d < key[j] {
                key[j] = d;
                link[j] = terms[i];
            }
        }
    }
    Ok(embed_edges(terms.iter().copied(), edges, metric)?.pruned(inst))
}
