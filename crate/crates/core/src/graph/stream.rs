use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Graph, GraphError, VertexId};

/// Arrival model of a stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StreamMode {
    /// Edges in arbitrary order.
    Edge,
    /// Vertices in some order, each carrying its edges to earlier vertices.
    Vertex,
}

impl fmt::Display for StreamMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StreamMode::Edge => "edge",
            StreamMode::Vertex => "vertex",
        })
    }
}

impl std::str::FromStr for StreamMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "edge" => Ok(StreamMode::Edge),
            "vertex" => Ok(StreamMode::Vertex),
            other => Err(format!("unknown stream mode `{other}` (expected edge|vertex)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StreamEvent {
    /// A single edge `{u, v}`; endpoints are kept as given.
    Edge(VertexId, VertexId),
    /// Vertex `v` arrives together with its edges to earlier vertices.
    Vertex { v: VertexId, back: Vec<VertexId> },
}

impl StreamEvent {
    pub fn mode(&self) -> StreamMode {
        match self {
            StreamEvent::Edge(..) => StreamMode::Edge,
            StreamEvent::Vertex { .. } => StreamMode::Vertex,
        }
    }
}

/// A finite graph stream over the vertex set `[0, declared_n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphStream {
    pub mode: StreamMode,
    pub declared_n: usize,
    pub events: Vec<StreamEvent>,
}

impl GraphStream {
    pub fn new(mode: StreamMode, declared_n: usize, events: Vec<StreamEvent>) -> Self {
        GraphStream {
            mode,
            declared_n,
            events,
        }
    }

    /// Total number of edges carried by the events.
    pub fn edge_count(&self) -> usize {
        self.events
            .iter()
            .map(|ev| match ev {
                StreamEvent::Edge(..) => 1,
                StreamEvent::Vertex { back, .. } => back.len(),
            })
            .sum()
    }

    /// All edges in stream order.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.events.iter().flat_map(|ev| -> Box<dyn Iterator<Item = _>> {
            match ev {
                StreamEvent::Edge(u, v) => Box::new(std::iter::once((*u, *v))),
                StreamEvent::Vertex { v, back } => Box::new(back.iter().map(move |&u| (u, *v))),
            }
        })
    }

    /// Checks mode homogeneity, id ranges and (for vertex streams) the
    /// arrival order. Self-loops and duplicate edges are caught by
    /// [`materialize`].
    pub fn validate(&self) -> Result<(), GraphError> {
        let n = self.declared_n;
        let in_range = |vertex: VertexId, event: usize| {
            if (vertex as usize) < n {
                Ok(())
            } else {
                Err(GraphError::VertexOutOfRange { vertex, n, event })
            }
        };
        let mut arrived = vec![false; if self.mode == StreamMode::Vertex { n } else { 0 }];
        for (event, ev) in self.events.iter().enumerate() {
            if ev.mode() != self.mode {
                return Err(GraphError::ModeMismatch {
                    expected: self.mode,
                    found: ev.mode(),
                    event,
                });
            }
            match ev {
                StreamEvent::Edge(u, v) => {
                    in_range(*u, event)?;
                    in_range(*v, event)?;
                }
                StreamEvent::Vertex { v, back } => {
                    in_range(*v, event)?;
                    if arrived[*v as usize] {
                        return Err(GraphError::RepeatedArrival { vertex: *v, event });
                    }
                    for &u in back {
                        in_range(u, event)?;
                        if u == *v {
                            return Err(GraphError::SelfLoop { vertex: u, event });
                        }
                        if !arrived[u as usize] {
                            return Err(GraphError::ArrivalOrder {
                                vertex: *v,
                                neighbor: u,
                                event,
                            });
                        }
                    }
                    arrived[*v as usize] = true;
                }
            }
        }
        Ok(())
    }
}

/// The graph defined by the union of all events of a valid stream.
///
/// Vertices of `[0, declared_n)` that never appear are isolated.
pub fn materialize(stream: &GraphStream) -> Result<Graph, GraphError> {
    stream.validate()?;
    let mut event_of_edge = Vec::with_capacity(stream.edge_count());
    for (event, ev) in stream.events.iter().enumerate() {
        match ev {
            StreamEvent::Edge(..) => event_of_edge.push(event),
            StreamEvent::Vertex { back, .. } => {
                event_of_edge.extend(std::iter::repeat_n(event, back.len()))
            }
        }
    }
    // Graph::from_edges reports positions in the flattened edge list; map
    // them back to event positions.
    Graph::from_edges(stream.declared_n, stream.edges()).map_err(|err| match err {
        GraphError::SelfLoop { vertex, event } => GraphError::SelfLoop {
            vertex,
            event: event_of_edge[event],
        },
        GraphError::DuplicateEdge { u, v, event } => GraphError::DuplicateEdge {
            u,
            v,
            event: event_of_edge[event],
        },
        other => other,
    })
}
