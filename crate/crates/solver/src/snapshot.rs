//! Plain-text snapshots of a mesh with one nodal field.
//!
//! ```text
//! <dimension> <node count> <element count>
//! <x> <y> <on boundary: 0|1>        one line per node
//! <i> <j> [<k>]                     one line per element, vertex indices
//! <u>                               one line per node
//! ```
//!
//! Floats carry 17 significant digits so that values round-trip exactly.

use std::io::{self, BufRead, Write};

use numeric::Real;

use crate::mesh::Mesh;

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub dimension: usize,
    pub nodes: Vec<[f64; 2]>,
    pub boundary: Vec<bool>,
    pub elements: Vec<Vec<usize>>,
    pub values: Vec<f64>,
}

pub fn write_snapshot<T: Real, W: Write>(mut w: W, mesh: &Mesh<T>, u: &[T]) -> io::Result<()> {
    writeln!(w, "{} {} {}", mesh.dimension(), mesh.node_count(), mesh.element_count())?;
    for (p, b) in mesh.nodes().iter().zip(mesh.boundary()) {
        writeln!(w, "{:.16e} {:.16e} {}", p[0].to_f64_lossy(), p[1].to_f64_lossy(), u8::from(*b))?;
    }
    for e in 0..mesh.element_count() {
        let vs: Vec<String> = mesh.vertices(e).iter().map(|v| v.to_string()).collect();
        writeln!(w, "{}", vs.join(" "))?;
    }
    for v in u {
        writeln!(w, "{:.16e}", v.to_f64_lossy())?;
    }
    Ok(())
}

fn bad(msg: &str) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, msg.to_string())
}

pub fn read_snapshot<R: BufRead>(r: R) -> io::Result<Snapshot> {
    let mut lines = r.lines();
    let mut next = || lines.next().ok_or_else(|| bad("truncated snapshot"))?;
    let header = next()?;
    let h: Vec<usize> = header.split_whitespace().map(|s| s.parse().map_err(|_| bad("bad header"))).collect::<Result<_, _>>()?;
    let [dimension, nn, ne] = h[..] else { return Err(bad("header needs three integers")) };
    let mut nodes = Vec::with_capacity(nn);
    let mut boundary = Vec::with_capacity(nn);
    for _ in 0..nn {
        let line = next()?;
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 3 {
            return Err(bad("node line needs x y flag"));
        }
        let x: f64 = f[0].parse().map_err(|_| bad("bad coordinate"))?;
        let y: f64 = f[1].parse().map_err(|_| bad("bad coordinate"))?;
        nodes.push([x, y]);
        boundary.push(f[2] == "1");
    }
    let mut elements = Vec::with_capacity(ne);
    for _ in 0..ne {
        let line = next()?;
        let vs: Vec<usize> = line.split_whitespace().map(|s| s.parse().map_err(|_| bad("bad index"))).collect::<Result<_, _>>()?;
        if vs.len() != dimension + 1 {
            return Err(bad("element arity does not match dimension"));
        }
        elements.push(vs);
    }
    let mut values = Vec::with_capacity(nn);
    for _ in 0..nn {
        values.push(next()?.trim().parse().map_err(|_| bad("bad value"))?);
    }
    Ok(Snapshot { dimension, nodes, boundary, elements, values })
}
