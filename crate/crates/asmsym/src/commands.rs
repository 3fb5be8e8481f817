//! One function per subcommand, each returning an [`Output`].

use std::collections::BTreeMap;
use std::fmt::Write as _;

use asmsym_core::acg::{
    acg_stabilizer, active_constraint_graph, dimension, independent_edge_count, AcgFilter, ActiveConstraintGraph,
    RealizeParams,
};
use asmsym_core::assembly::{
    configuration_orbit, strict_congruence_group, strict_order_preserving_group, strict_permuted_congruence_group,
    waut_with_cap, AssemblyConfiguration, Waut,
};
use asmsym_core::atlas::{
    assemble_atlas, assembly_forest, assembly_paths, atlas_edge_range, atlas_layer, coarse_assembly_paths,
    zigzag_paths, AssemblyForest, AtlasOptions, NodeStatus, StratificationAtlas,
};
use asmsym_core::cayley::{
    convex_cayley_check, two_sum_components, two_tree_polytope, CayleyError, CayleyVerdict, MAX_FLATTEN_EDGES,
};
use asmsym_core::egf::solve_group_egf;
use asmsym_core::graph::Graph;
use asmsym_core::permgroup::{named_group, subgroups};
use asmsym_core::rigidity::generic_rigidity;
use asmsym_core::treecount::{enumerate_trees, pathway_census, sci3};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::Caps;
use crate::error::Error;
use crate::output::Output;
use crate::schema::GraphFile;

fn csv_row<I: IntoIterator<Item = S>, S: ToString>(items: I) -> Vec<String> {
    items.into_iter().map(|s| s.to_string()).collect()
}

pub fn trees_count(group: &str, order: usize) -> Result<Output, Error> {
    let g = named_group(group)?;
    let lattice = subgroups(&g)?;
    let classes = solve_group_egf(&lattice, order)?;
    // Classes with the same order and sequence share a row.
    let mut rows: Vec<(usize, Vec<usize>, Vec<String>)> = Vec::new();
    for c in &classes {
        let t: Vec<String> = c.t.iter().map(|x| x.to_string()).collect();
        match rows.iter_mut().find(|r| r.0 == c.order && r.2 == t) {
            Some(r) => r.1.push(c.class),
            None => rows.push((c.order, vec![c.class], t)),
        }
    }
    let mut text = String::new();
    let mut csv = vec![csv_row(["order", "classes"].into_iter().map(String::from).chain((1..=order).map(|n| format!("t{n}"))))];
    let mut json_rows = Vec::new();
    for (ord, cls, t) in &rows {
        let names: Vec<String> = cls.iter().map(|c| c.to_string()).collect();
        writeln!(text, "|H|={ord} classes {}: {}", names.join(" "), t.join(", ")).ok();
        let mut r = vec![ord.to_string(), names.join(" ")];
        r.extend(t.iter().cloned());
        csv.push(r);
        json_rows.push(json!({"order": ord, "classes": cls, "t": t}));
    }
    Ok(Output {
        json: json!({"group": group, "group_order": g.order(), "rows": json_rows}),
        text,
        csv: Some(csv),
        ..Output::default()
    })
}

pub fn trees_enumerate(leaves: usize, caps: &Caps) -> Result<Output, Error> {
    if leaves > caps.leaves.get() {
        return Err(Error::Usage(format!("{leaves} leaves exceeds the cap of {}", caps.leaves)));
    }
    let trees = enumerate_trees(leaves)?;
    let list: Vec<String> = trees.iter().map(|t| t.to_string()).collect();
    let mut csv = vec![csv_row(["tree"])];
    csv.extend(list.iter().map(|t| vec![t.clone()]));
    Ok(Output {
        text: list.iter().map(|t| format!("{t}\n")).collect(),
        json: json!({"leaves": leaves, "count": list.len(), "trees": list}),
        csv: Some(csv),
        ..Output::default()
    })
}

pub fn trees_pathways(group: &str, orbits: usize) -> Result<Output, Error> {
    let g = named_group(group)?;
    let census = pathway_census(&g, orbits)?;
    let mut text = String::new();
    let mut csv = vec![csv_row(["m", "N", "approx"])];
    let mut rows = Vec::new();
    for (m, n) in &census.counts {
        writeln!(text, "N({m}) = {n}  ({})", sci3(n)).ok();
        csv.push(csv_row([m.to_string(), n.to_string(), sci3(n)]));
        rows.push(json!({"m": m, "n": n.to_string(), "approx": sci3(n)}));
    }
    writeln!(text, "total {}", census.total()).ok();
    writeln!(text, "trees {}", census.weighted_total()).ok();
    let classes: Vec<Value> = census
        .classes
        .iter()
        .map(|c| {
            json!({"class": c.class, "order": c.order, "index": c.index, "size": c.size,
                   "t": c.t.to_string(), "t_bar": c.t_bar.to_string()})
        })
        .collect();
    Ok(Output {
        json: json!({"group": group, "orbits": orbits, "rows": rows, "total": census.total().to_string(),
                     "trees": census.weighted_total().to_string(), "classes": classes}),
        text,
        csv: Some(csv),
        ..Output::default()
    })
}

pub fn group_subgroups(group: &str) -> Result<Output, Error> {
    let g = named_group(group)?;
    let lattice = subgroups(&g)?;
    let mut text = format!("{} subgroups in {} classes\n", lattice.len(), lattice.classes().len());
    let mut csv = vec![csv_row(["class", "order", "size", "generators"])];
    let mut rows = Vec::new();
    for (c, members) in lattice.classes().iter().enumerate() {
        let rep = lattice.subgroup(members[0]);
        let gens: Vec<String> = rep.generators().iter().map(|p| p.to_string()).collect();
        writeln!(text, "class {c}: order {} x{} <{}>", rep.order(), members.len(), gens.join(", ")).ok();
        csv.push(csv_row([c.to_string(), rep.order().to_string(), members.len().to_string(), gens.join(" ")]));
        rows.push(json!({"class": c, "order": rep.order(), "size": members.len(), "generators": gens}));
    }
    Ok(Output {
        json: json!({"group": group, "group_order": g.order(), "subgroups": lattice.len(), "classes": rows}),
        text,
        csv: Some(csv),
        ..Output::default()
    })
}

/// `μ(H, G)` for each class representative `H`.
pub fn group_mobius(group: &str) -> Result<Output, Error> {
    let g = named_group(group)?;
    let lattice = subgroups(&g)?;
    let top = lattice.top();
    let mut text = String::new();
    let mut csv = vec![csv_row(["class", "order", "size", "mu"])];
    let mut rows = Vec::new();
    for (c, members) in lattice.classes().iter().enumerate() {
        let h = members[0];
        let mu = lattice.mobius_value(h, top)?;
        writeln!(text, "class {c}: order {} x{} mu {mu}", lattice.order(h), members.len()).ok();
        csv.push(csv_row([c.to_string(), lattice.order(h).to_string(), members.len().to_string(), mu.to_string()]));
        rows.push(json!({"class": c, "order": lattice.order(h), "size": members.len(), "mu": mu}));
    }
    Ok(Output {
        json: json!({"group": group, "classes": rows}),
        text,
        csv: Some(csv),
        ..Output::default()
    })
}

fn group_json(w: &Waut) -> Vec<String> {
    w.elements().iter().map(|p| w.element(p).to_string()).collect()
}

pub fn assembly_waut(config: &AssemblyConfiguration, caps: &Caps) -> Result<Output, Error> {
    let w = waut_with_cap(config, caps.waut.get())?;
    let elements = group_json(&w);
    let mut text = format!("order {}\n", w.order());
    for e in &elements {
        writeln!(text, "{e}").ok();
    }
    let mut csv = vec![csv_row(["element"])];
    csv.extend(elements.iter().map(|e| vec![e.clone()]));
    Ok(Output {
        json: json!({"order": w.order(), "elements": elements}),
        text,
        csv: Some(csv),
        ..Output::default()
    })
}

pub fn assembly_congruence(config: &AssemblyConfiguration, caps: &Caps) -> Result<Output, Error> {
    let w = waut_with_cap(config, caps.waut.get())?;
    let groups = [
        ("congruence", strict_congruence_group(config, &w)),
        ("order_preserving", strict_order_preserving_group(config, &w)),
        ("permuted_congruence", strict_permuted_congruence_group(config, &w)),
    ];
    let orbit = configuration_orbit(config, &w).len();
    let mut text = format!("waut order {}\n", w.order());
    let mut json = serde_json::Map::new();
    let mut csv = vec![csv_row(["group", "order"])];
    csv.push(csv_row(["waut".to_string(), w.order().to_string()]));
    for (name, g) in &groups {
        writeln!(text, "strict {name} group order {}: {}", g.order(), group_json(g).join(" ")).ok();
        json.insert((*name).into(), json!({"order": g.order(), "elements": group_json(g)}));
        csv.push(csv_row([name.to_string(), g.order().to_string()]));
    }
    writeln!(text, "orbit up to congruence {orbit}").ok();
    json.insert("waut_order".into(), json!(w.order()));
    json.insert("orbit".into(), json!(orbit));
    Ok(Output {
        json: Value::Object(json),
        text,
        csv: Some(csv),
        ..Output::default()
    })
}

fn acg_json(g: &ActiveConstraintGraph) -> Value {
    let labels: Vec<[[usize; 2]; 2]> = g
        .edges()
        .iter()
        .map(|&(u, v)| {
            let (a, b) = (g.label(u), g.label(v));
            [[a.0 + 1, a.1 + 1], [b.0 + 1, b.1 + 1]]
        })
        .collect();
    json!({"vertices": g.vertex_count(), "edges": g.edges(), "labels": labels})
}

pub fn assembly_acg(config: &AssemblyConfiguration, caps: &Caps) -> Result<Output, Error> {
    let g = active_constraint_graph(config)?;
    let w = waut_with_cap(config, caps.waut.get())?;
    let stab = acg_stabilizer(&g, &w)?;
    let report = generic_rigidity(&g.full_graph());
    let dim = dimension(&g);
    let verdict = format!("{:?}", report.verdict).to_lowercase();
    let text = format!(
        "{g}\nedges {}\nrigidity {verdict} (rank {} of {})\ndimension {dim}\nstabilizer {} orbit {}\n",
        g.edge_count(),
        report.rank,
        report.full_rank,
        stab.order(),
        w.order() / stab.order()
    );
    let mut csv = vec![csv_row(["u", "v"])];
    csv.extend(g.edges().iter().map(|&(u, v)| csv_row([u, v])));
    let mut json = acg_json(&g);
    let m = json.as_object_mut().expect("object");
    m.insert("rigidity".into(), json!(verdict));
    m.insert("independent_edges".into(), json!(independent_edge_count(&g)));
    m.insert("dimension".into(), json!(dim));
    m.insert("stabilizer_order".into(), json!(stab.order()));
    m.insert("orbit_size".into(), json!(w.order() / stab.order()));
    Ok(Output {
        json,
        text,
        csv: Some(csv),
        ..Output::default()
    })
}

#[derive(Clone, Debug, Default)]
pub struct AtlasArgs {
    pub min_edges: usize,
    pub max_edges: Option<usize>,
    pub min_degree: usize,
    pub rigid: bool,
    pub connected: bool,
    pub all_graphs: bool,
    pub abstract_lattice: bool,
    pub realize: bool,
}

/// Layers are built in parallel and linked afterwards.
pub fn build(config: &AssemblyConfiguration, args: &AtlasArgs, caps: &Caps) -> Result<StratificationAtlas, Error> {
    let w = waut_with_cap(config, caps.waut.get())?;
    let options = AtlasOptions {
        min_edges: args.min_edges,
        max_edges: args.max_edges.unwrap_or(usize::MAX),
        filter: AcgFilter {
            min_degree: args.min_degree,
            rigid: args.rigid,
            connected: args.connected,
        },
        independent_only: !args.all_graphs,
        abstract_lattice: args.abstract_lattice,
        realize: args.realize.then(|| (config.clone(), RealizeParams::default())),
        candidate_cap: caps.candidates.get(),
    };
    let range: Vec<usize> = atlas_edge_range(&w, &options).collect();
    let layers = range
        .par_iter()
        .map(|&e| atlas_layer(&w, e, &options))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(assemble_atlas(&w, layers, &options))
}

fn status_name(s: NodeStatus) -> &'static str {
    match s {
        NodeStatus::Unchecked => "unchecked",
        NodeStatus::Realizable => "realizable",
        NodeStatus::Undetermined => "undetermined",
    }
}

pub fn atlas_json(a: &StratificationAtlas) -> Value {
    let nodes: Vec<Value> = a
        .nodes()
        .iter()
        .map(|n| {
            json!({"name": n.name, "edges": n.graph.edges(), "edge_count": n.graph.edge_count(),
                   "dimension": n.dimension, "independent_edges": n.independent_edges,
                   "orbit_size": n.orbit_size, "stabilizer_order": n.stabilizer_order,
                   "realizability": status_name(n.status)})
        })
        .collect();
    let edges: Vec<Value> = a
        .edges()
        .iter()
        .map(|e| {
            json!({"parent": a.nodes()[e.parent].name, "child": a.nodes()[e.child].name,
                   "embedding": e.embedding.to_string()})
        })
        .collect();
    json!({"waut_order": a.waut().order(), "nodes": nodes, "hasse": edges})
}

/// Layered by dimension; undetermined nodes are filled grey.
pub fn atlas_dot(a: &StratificationAtlas) -> String {
    let mut s = String::from("digraph atlas {\n  rankdir=TB;\n  node [shape=box, style=filled, fillcolor=white];\n");
    let mut by_dim: BTreeMap<std::cmp::Reverse<usize>, Vec<&str>> = BTreeMap::new();
    for n in a.nodes() {
        by_dim.entry(std::cmp::Reverse(n.dimension)).or_default().push(&n.name);
        let fill = if n.status == NodeStatus::Undetermined { ", fillcolor=grey" } else { "" };
        writeln!(s, "  \"{}\" [label=\"{}\\ndim {}\\norbit {}\"{fill}];", n.name, n.name, n.dimension, n.orbit_size).ok();
    }
    for (dim, names) in &by_dim {
        let list: Vec<String> = names.iter().map(|n| format!("\"{n}\"")).collect();
        writeln!(s, "  {{ rank=same; /* dim {} */ {}; }}", dim.0, list.join("; ")).ok();
    }
    for e in a.edges() {
        writeln!(s, "  \"{}\" -> \"{}\";", a.nodes()[e.parent].name, a.nodes()[e.child].name).ok();
    }
    s.push_str("}\n");
    s
}

pub fn atlas_build(config: &AssemblyConfiguration, args: &AtlasArgs, caps: &Caps) -> Result<Output, Error> {
    let a = build(config, args, caps)?;
    let mut text = format!("{} nodes, {} hasse edges\n", a.nodes().len(), a.edges().len());
    let mut csv = vec![csv_row(["name", "edge_count", "dimension", "orbit_size", "stabilizer_order", "realizability"])];
    for n in a.nodes() {
        let children: Vec<&str> = a.children(a.node(&n.name)?).iter().map(|e| a.nodes()[e.child].name.as_str()).collect();
        writeln!(
            text,
            "{} dim {} orbit {} stab {} {} -> {}",
            n.name,
            n.dimension,
            n.orbit_size,
            n.stabilizer_order,
            status_name(n.status),
            children.join(" ")
        )
        .ok();
        csv.push(csv_row([
            n.name.clone(),
            n.graph.edge_count().to_string(),
            n.dimension.to_string(),
            n.orbit_size.to_string(),
            n.stabilizer_order.to_string(),
            status_name(n.status).to_string(),
        ]));
    }
    Ok(Output {
        json: atlas_json(&a),
        dot: Some(atlas_dot(&a)),
        text,
        csv: Some(csv),
        ..Output::default()
    })
}

fn names(a: &StratificationAtlas, path: &[usize]) -> Vec<String> {
    path.iter().map(|&i| a.nodes()[i].name.clone()).collect()
}

fn limit<T>(mut items: Vec<T>, truncated: bool, caps: &Caps) -> (Vec<T>, bool) {
    let over = items.len() > caps.paths.get();
    items.truncate(caps.paths.get());
    (items, truncated || over)
}

fn path_output(a: &StratificationAtlas, paths: &[Vec<usize>], truncated: bool, sep: &str) -> Output {
    let named: Vec<Vec<String>> = paths.iter().map(|p| names(a, p)).collect();
    let mut csv = vec![csv_row(["path"])];
    csv.extend(named.iter().map(|p| vec![p.join(" ")]));
    Output {
        text: named.iter().map(|p| format!("{}\n", p.join(sep))).collect::<String>() + &format!("{} paths\n", named.len()),
        json: json!({"count": named.len(), "paths": named}),
        csv: Some(csv),
        truncated,
        ..Output::default()
    }
}

pub fn atlas_paths(config: &AssemblyConfiguration, args: &AtlasArgs, caps: &Caps, from: &str, to: &str) -> Result<Output, Error> {
    let a = build(config, args, caps)?;
    let p = assembly_paths(&a, a.node(from)?, a.node(to)?, caps.chain_length.get())?;
    let (paths, truncated) = limit(p.paths, p.truncated, caps);
    Ok(path_output(&a, &paths, truncated, " < "))
}

pub fn atlas_coarse_paths(
    config: &AssemblyConfiguration,
    args: &AtlasArgs,
    caps: &Caps,
    from: &str,
    to: &str,
) -> Result<Output, Error> {
    let a = build(config, args, caps)?;
    let p = coarse_assembly_paths(&a, a.node(from)?, a.node(to)?, caps.chain_length.get())?;
    let seqs: Vec<Vec<usize>> = p.paths.iter().map(|c| c.nodes.clone()).collect();
    let (seqs, truncated) = limit(seqs, p.truncated, caps);
    Ok(path_output(&a, &seqs, truncated, " < "))
}

pub fn atlas_zigzag(config: &AssemblyConfiguration, args: &AtlasArgs, caps: &Caps, from: &str, to: &str) -> Result<Output, Error> {
    let a = build(config, args, caps)?;
    let p = zigzag_paths(&a, a.node(from)?, a.node(to)?, caps.zigzag_length.get())?;
    let (paths, truncated) = limit(p.paths, p.truncated, caps);
    let mut out = path_output(&a, &paths, truncated, " ~ ");
    out.json["total"] = json!(p.count);
    Ok(out)
}

fn forest_json(f: &AssemblyForest) -> Value {
    let nodes: Vec<Value> = f.nodes.iter().map(|n| json!({"vertices": n.vertices, "children": n.children})).collect();
    json!({"nodes": nodes, "leaves": f.leaves, "roots": f.roots, "tree": f.is_tree()})
}

fn forest_text(f: &AssemblyForest, node: usize) -> String {
    let n = &f.nodes[node];
    let vs: Vec<String> = n.vertices.iter().map(|v| (v + 1).to_string()).collect();
    if n.children.is_empty() {
        return format!("{{{}}}", vs.join(","));
    }
    let kids: Vec<String> = n.children.iter().map(|&c| forest_text(f, c)).collect();
    format!("[{}]", kids.join(" "))
}

/// Coarse paths grouped by the forest they build.
pub fn atlas_forest(config: &AssemblyConfiguration, args: &AtlasArgs, caps: &Caps, from: &str, to: &str) -> Result<Output, Error> {
    let a = build(config, args, caps)?;
    let p = coarse_assembly_paths(&a, a.node(from)?, a.node(to)?, caps.chain_length.get())?;
    let (chains, truncated) = limit(p.paths, p.truncated, caps);
    let mut groups: Vec<(AssemblyForest, Vec<Vec<String>>)> = Vec::new();
    for c in &chains {
        let f = assembly_forest(&c.chain)?;
        let seq = names(&a, &c.nodes);
        match groups.iter_mut().find(|(g, _)| g.key() == f.key()) {
            Some((_, paths)) => paths.push(seq),
            None => groups.push((f, vec![seq])),
        }
    }
    let mut text = String::new();
    let mut json_groups = Vec::new();
    let mut csv = vec![csv_row(["forest", "tree", "paths"])];
    for (f, paths) in &groups {
        let shape: Vec<String> = f.roots.iter().map(|&r| forest_text(f, r)).collect();
        let kind = if f.is_tree() { "tree" } else { "forest" };
        writeln!(text, "{kind} {} from {} coarse paths", shape.join(" "), paths.len()).ok();
        csv.push(csv_row([shape.join(" "), f.is_tree().to_string(), paths.len().to_string()]));
        let mut j = forest_json(f);
        j["paths"] = json!(paths);
        json_groups.push(j);
    }
    Ok(Output {
        json: json!({"forests": json_groups}),
        text,
        csv: Some(csv),
        truncated,
        ..Output::default()
    })
}

fn verdict_output(v: &CayleyVerdict) -> Output {
    match v {
        CayleyVerdict::Convexifiable => Output {
            json: json!({"convexifiable": true}),
            text: "convexifiable\n".into(),
            ..Output::default()
        },
        CayleyVerdict::NotConvexifiable { parameter, component } => Output {
            json: json!({"convexifiable": false, "parameter": [parameter.0, parameter.1],
                         "component": GraphFile::from_graph(&component_graph(component))}),
            text: format!("not convexifiable: {}-{} lies in component {component}\n", parameter.0, parameter.1),
            ..Output::default()
        },
    }
}

fn component_graph(c: &asmsym_core::cayley::SumComponent) -> Graph {
    let n = c.vertices.iter().max().map_or(0, |m| m + 1);
    Graph::from_edges(n, c.edges.iter().map(|&(u, v, _)| (u, v))).expect("component edges")
}

pub fn cayley_check(graph: &GraphFile, nonedges: &[(usize, usize)]) -> Result<Output, Error> {
    let h = graph.to_graph()?;
    let mut out = verdict_output(&convex_cayley_check(&h, nonedges)?);
    let mut union = h.clone();
    for &(u, v) in nonedges {
        union.add_edge(u, v).ok();
    }
    let comps: Vec<String> = two_sum_components(&union).components.iter().map(|c| c.to_string()).collect();
    out.json["components"] = json!(comps);
    Ok(out)
}

pub fn cayley_polytope(graph: &GraphFile, nonedges: &[(usize, usize)]) -> Result<Output, Error> {
    let h = graph.to_graph()?;
    let p = two_tree_polytope(&h, nonedges, &graph.intervals()?)?;
    let vars: Vec<String> = p.vars.iter().map(|(u, v)| format!("{u}-{v}")).collect();
    let ineqs: Vec<Value> = p.ineqs.iter().map(|q| json!({"coeffs": q.coeffs, "rhs": q.rhs.to_string()})).collect();
    let mut csv = vec![csv_row(vars.iter().cloned().chain(["rhs".to_string()]))];
    for q in &p.ineqs {
        csv.push(csv_row(q.coeffs.iter().map(|c| c.to_string()).chain([q.rhs.to_string()])));
    }
    Ok(Output {
        json: json!({"vars": vars, "ineqs": ineqs}),
        text: p.to_string(),
        csv: Some(csv),
        ..Output::default()
    })
}

/// Partition scan in parallel; the first failing split is reported.
pub fn cayley_flatten(graph: &GraphFile) -> Result<Output, Error> {
    let h = graph.to_graph()?;
    let edges: Vec<(usize, usize)> = h.edges().collect();
    if edges.len() > MAX_FLATTEN_EDGES {
        return Err(CayleyError::TooManyEdges {
            edges: edges.len(),
            max: MAX_FLATTEN_EDGES,
        }
        .into());
    }
    let failing = (0u32..(1u32 << edges.len()))
        .into_par_iter()
        .map(|mask| {
            let mut g = h.clone();
            let mut f = Vec::new();
            for (i, &(u, v)) in edges.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    g.remove_edge(u, v);
                    f.push((u, v));
                }
            }
            convex_cayley_check(&g, &f).map(|v| (!v.is_convexifiable()).then_some(f))
        })
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .flatten()
        .next();
    Ok(match failing {
        None => Output {
            json: json!({"flattenable": true}),
            text: "flattenable\n".into(),
            ..Output::default()
        },
        Some(f) => {
            let pairs: Vec<String> = f.iter().map(|(u, v)| format!("{u}-{v}")).collect();
            Output {
                json: json!({"flattenable": false, "parameters": pairs}),
                text: format!("not flattenable: parameters {} fail\n", pairs.join(",")),
                ..Output::default()
            }
        }
    })
}
