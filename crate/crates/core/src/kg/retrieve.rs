use std::collections::BTreeSet;

use super::graph::Graph;
use super::term::{Iri, Triple};

/// Breadth-first neighbourhood of `seeds`.
///
/// Hop 1 collects every triple whose subject or object is a seed; each later
/// hop expands from the IRIs first reached on the previous hop. `max_hops == 0`
/// yields an empty graph.
pub fn retrieve_subgraph<S: Clone>(graph: &Graph<S>, seeds: &BTreeSet<Iri>, max_hops: usize) -> Graph<S> {
    let mut visited: BTreeSet<&Iri> = seeds.iter().collect();
    let mut frontier: Vec<&Iri> = seeds.iter().collect();
    let mut collected: BTreeSet<&Triple<S>> = BTreeSet::new();

    for _ in 0..max_hops {
        if frontier.is_empty() {
            break;
        }
        let mut next = Vec::new();
        for node in frontier {
            for t in graph.incident(node) {
                if !collected.insert(t) {
                    continue;
                }
                let ends = std::iter::once(&t.subject).chain(t.object.as_iri());
                for end in ends {
                    if visited.insert(end) {
                        next.push(end);
                    }
                }
            }
        }
        frontier = next;
    }
    collected.into_iter().cloned().collect()
}
