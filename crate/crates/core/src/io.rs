//! Lattice JSON, binary STL, OBJ and CSV.

use std::io::{self, Read, Write};

use serde::{Deserialize, Serialize};

use crate::algebra::Vec3;
use crate::lattice::{validate_lattice, Beam, FilletSpec, Hub, Lattice, ValidationReport};
use crate::solid::Mesh;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HubRecord {
    id: String,
    center: [f64; 3],
    radius: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BeamRecord {
    id: String,
    hubs: [String; 2],
    k: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FilletRecord {
    hub: String,
    beams: [String; 2],
    beta: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LatticeFile {
    hubs: Vec<HubRecord>,
    beams: Vec<BeamRecord>,
    #[serde(default)]
    fillets: Vec<FilletRecord>,
}

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("lattice file is not valid UTF-8")]
    Utf8,
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },
    #[error("lattice failed validation:\n{0}")]
    Validation(ValidationReport),
}

/// Strict parse without validation. Errors carry a JSON-pointer location.
pub fn parse_lattice(text: &str) -> Result<Lattice, LoadError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let file: LatticeFile = serde_path_to_error::deserialize(de).map_err(|e| {
        let location = pointer(e.path());
        LoadError::Parse { location, message: e.inner().to_string() }
    })?;
    Ok(Lattice {
        hubs: file.hubs.into_iter().map(|h| Hub::new(h.id, Vec3::from_array(h.center), h.radius)).collect(),
        beams: file
            .beams
            .into_iter()
            .map(|b| {
                let [a, c] = b.hubs;
                Beam::new(b.id, a, c, b.k)
            })
            .collect(),
        fillets: file
            .fillets
            .into_iter()
            .map(|f| {
                let [i, j] = f.beams;
                FilletSpec::new(f.hub, i, j, f.beta)
            })
            .collect(),
    })
}

fn pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        out.push('/');
        match seg {
            Segment::Seq { index } => out.push_str(&index.to_string()),
            Segment::Map { key } => out.push_str(&key.replace('~', "~0").replace('/', "~1")),
            Segment::Enum { variant } => out.push_str(variant),
            Segment::Unknown => out.push('?'),
        }
    }
    if out.is_empty() {
        out.push('/');
    }
    out
}

/// Strict parse followed by validation; warnings are allowed.
pub fn load_lattice(bytes: &[u8]) -> Result<Lattice, LoadError> {
    let text = std::str::from_utf8(bytes).map_err(|_| LoadError::Utf8)?;
    let lattice = parse_lattice(text)?;
    let report = validate_lattice(&lattice);
    if !report.is_clean() {
        return Err(LoadError::Validation(report));
    }
    Ok(lattice)
}

pub fn lattice_to_json(lattice: &Lattice) -> String {
    let file = LatticeFile {
        hubs: lattice
            .hubs
            .iter()
            .map(|h| HubRecord { id: h.id.clone(), center: h.center.to_array(), radius: h.radius })
            .collect(),
        beams: lattice
            .beams
            .iter()
            .map(|b| BeamRecord { id: b.id.clone(), hubs: [b.hub_a.clone(), b.hub_b.clone()], k: b.k })
            .collect(),
        fillets: lattice
            .fillets
            .iter()
            .map(|f| FilletRecord { hub: f.hub.clone(), beams: [f.beam_i.clone(), f.beam_j.clone()], beta: f.beta })
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("lattice serializes")
}

/// Size in bytes of a binary STL with `n` triangles.
pub fn stl_len(n: usize) -> usize {
    84 + 50 * n
}

/// Binary STL: 80-byte header, triangle count, then per triangle the unit
/// normal, three vertices and a zero attribute word, all little-endian.
pub fn write_stl(mesh: &Mesh, mut w: impl Write) -> io::Result<()> {
    let mut header = [0u8; 80];
    let tag = b"quador-fillet binary stl";
    header[..tag.len()].copy_from_slice(tag);
    w.write_all(&header)?;
    let n = u32::try_from(mesh.triangles.len()).map_err(|_| io::Error::other("too many triangles for STL"))?;
    w.write_all(&n.to_le_bytes())?;
    for i in 0..mesh.triangles.len() {
        let n = mesh.normal(i);
        let [a, b, c] = mesh.triangle(i);
        for v in [n, a, b, c] {
            for x in v.to_array() {
                w.write_all(&(x as f32).to_le_bytes())?;
            }
        }
        w.write_all(&[0, 0])?;
    }
    Ok(())
}

/// One STL facet as stored: normal then three vertices.
pub type StlFacet = [[f32; 3]; 4];

pub fn read_stl(mut r: impl Read) -> io::Result<Vec<StlFacet>> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    let bad = |m: &str| io::Error::new(io::ErrorKind::InvalidData, m.to_string());
    if bytes.len() < 84 {
        return Err(bad("STL shorter than its header"));
    }
    let n = u32::from_le_bytes(bytes[80..84].try_into().unwrap()) as usize;
    if bytes.len() != stl_len(n) {
        return Err(bad("STL length does not match its triangle count"));
    }
    Ok(bytes[84..]
        .chunks_exact(50)
        .map(|rec| {
            std::array::from_fn(|v| {
                std::array::from_fn(|k| {
                    let o = 12 * v + 4 * k;
                    f32::from_le_bytes(rec[o..o + 4].try_into().unwrap())
                })
            })
        })
        .collect())
}

/// `v` and `f` records with 1-based indices.
pub fn write_obj_mesh(mesh: &Mesh, mut w: impl Write) -> io::Result<()> {
    writeln!(w, "# {} vertices, {} triangles", mesh.vertices.len(), mesh.triangles.len())?;
    for v in &mesh.vertices {
        writeln!(w, "v {} {} {}", fmt_num(v.x), fmt_num(v.y), fmt_num(v.z))?;
    }
    for t in &mesh.triangles {
        writeln!(w, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1)?;
    }
    Ok(())
}

/// A polyline for OBJ export; closed polylines repeat their first index.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    pub comments: Vec<String>,
    pub points: Vec<Vec3>,
    pub closed: bool,
}

pub fn write_obj_polylines(lines: &[Polyline], mut w: impl Write) -> io::Result<()> {
    let mut base = 1usize;
    for line in lines {
        for c in &line.comments {
            writeln!(w, "# {c}")?;
        }
        for p in &line.points {
            writeln!(w, "v {} {} {}", fmt_num(p.x), fmt_num(p.y), fmt_num(p.z))?;
        }
        let mut idx: Vec<String> = (0..line.points.len()).map(|i| (base + i).to_string()).collect();
        if line.closed && !line.points.is_empty() {
            idx.push(base.to_string());
        }
        writeln!(w, "l {}", idx.join(" "))?;
        base += line.points.len();
    }
    Ok(())
}

/// Fixed 12 decimals with trailing zeros trimmed; negative zero prints as
/// `0`.
pub fn fmt_num(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let mut s = format!("{x:.12}");
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    if s == "-0" {
        s = "0".into();
    }
    s
}

#[derive(Debug, thiserror::Error)]
pub enum CsvError {
    #[error("row {row}: {message}")]
    Row { row: usize, message: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Reads `x,y,z` rows. A leading `x,y,z` header is skipped. Rows are
/// numbered from 1 as they appear in the file.
pub fn read_points_csv(r: impl Read) -> Result<Vec<Vec3>, CsvError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(false).flexible(true).trim(csv::Trim::All).from_reader(r);
    let mut out = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let row = i + 1;
        let rec = rec.map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(e) => CsvError::Io(e),
            other => CsvError::Row { row, message: format!("{other:?}") },
        })?;
        if row == 1 && rec.iter().map(|s| s.to_ascii_lowercase()).eq(["x", "y", "z"]) {
            continue;
        }
        if rec.len() != 3 {
            return Err(CsvError::Row { row, message: format!("expected 3 fields, found {}", rec.len()) });
        }
        let mut xyz = [0.0; 3];
        for (k, field) in rec.iter().enumerate() {
            xyz[k] = field
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| CsvError::Row { row, message: format!("`{field}` is not a finite number") })?;
        }
        out.push(Vec3::from_array(xyz));
    }
    Ok(out)
}

/// A classified sample, one CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleRow {
    pub point: Vec3,
    pub value: f64,
    pub state: String,
    pub label: String,
}

pub const SAMPLE_HEADER: [&str; 6] = ["x", "y", "z", "value", "state", "label"];

pub fn write_sample_csv(rows: &[SampleRow], w: impl Write) -> Result<(), CsvError> {
    let mut out = csv::Writer::from_writer(w);
    let io_err = |e: csv::Error| CsvError::Io(e.into());
    out.write_record(SAMPLE_HEADER).map_err(io_err)?;
    for r in rows {
        out.write_record([
            fmt_num(r.point.x),
            fmt_num(r.point.y),
            fmt_num(r.point.z),
            fmt_num(r.value),
            r.state.clone(),
            r.label.clone(),
        ])
        .map_err(io_err)?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIXTURE: &str = r#"{
      "hubs": [
        {"id": "h0", "center": [0, 0, 0], "radius": 1},
        {"id": "h1", "center": [4, 0, 0], "radius": 1},
        {"id": "h2", "center": [0, 4, 0], "radius": 1}
      ],
      "beams": [
        {"id": "b0", "hubs": ["h0", "h1"], "k": 4},
        {"id": "b1", "hubs": ["h0", "h2"], "k": 4}
      ],
      "fillets": [{"hub": "h0", "beams": ["b0", "b1"], "beta": 1}]
    }"#;

    #[test]
    fn loads_fixture() {
        let l = load_lattice(FIXTURE.as_bytes()).unwrap();
        assert_eq!((l.hubs.len(), l.beams.len(), l.fillets.len()), (3, 2, 1));
        assert_eq!(l.beams[1].hub_b, "h2");
    }

    #[test]
    fn negative_radius_names_hub() {
        let text = FIXTURE.replacen(r#""radius": 1}"#, r#""radius": -1}"#, 1);
        match load_lattice(text.as_bytes()) {
            Err(LoadError::Validation(r)) => assert!(r.errors().any(|e| e.subject == "h0"), "{r}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_key_is_named() {
        let text = FIXTURE.replacen(r#""k": 4}"#, r#""k": 4, "color": "red"}"#, 1);
        match load_lattice(text.as_bytes()) {
            Err(LoadError::Parse { location, message }) => {
                assert!(message.contains("color"), "{message}");
                assert_eq!(location, "/beams/0/color");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn wrong_array_length() {
        let text = FIXTURE.replacen("[0, 0, 0]", "[0, 0]", 1);
        match parse_lattice(&text) {
            Err(LoadError::Parse { location, .. }) => assert!(location.starts_with("/hubs/0/center"), "{location}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn json_round_trip() {
        let l = load_lattice(FIXTURE.as_bytes()).unwrap();
        assert_eq!(parse_lattice(&lattice_to_json(&l)).unwrap(), l);
    }

    #[test]
    fn stl_layout() {
        let mesh = Mesh {
            vertices: vec![Vec3::ZERO, Vec3::X, Vec3::Y, Vec3::Z],
            triangles: vec![[0, 2, 1], [0, 1, 3], [0, 3, 2], [1, 2, 3]],
        };
        let mut buf = Vec::new();
        write_stl(&mesh, &mut buf).unwrap();
        assert_eq!(buf.len(), stl_len(4));
        assert_eq!(&buf[80..84], &4u32.to_le_bytes());
        let facets = read_stl(buf.as_slice()).unwrap();
        assert_eq!(facets[1][1..], [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]]);
        assert_eq!(facets[0][0], [0.0, 0.0, -1.0]);
    }

    #[test]
    fn number_format() {
        assert_eq!(fmt_num(-1.0), "-1");
        assert_eq!(fmt_num(-0.173125), "-0.173125");
        assert_eq!(fmt_num(-0.0), "0");
        assert_eq!(fmt_num(-1e-14), "0");
        assert_eq!(fmt_num(1.05), "1.05");
    }

    #[test]
    fn points_csv() {
        let pts = read_points_csv("x,y,z\n0,0,0\n1.05, 1.05, 0\n".as_bytes()).unwrap();
        assert_eq!(pts, vec![Vec3::ZERO, Vec3::new(1.05, 1.05, 0.0)]);
        match read_points_csv("0,0,0\na,b\n".as_bytes()) {
            Err(CsvError::Row { row, .. }) => assert_eq!(row, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn sample_csv() {
        let rows = [SampleRow { point: Vec3::ZERO, value: -1.0, state: "inside".into(), label: "HUB(h0)".into() }];
        let mut buf = Vec::new();
        write_sample_csv(&rows, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "x,y,z,value,state,label\n0,0,0,-1,inside,HUB(h0)\n");
    }

    #[test]
    fn polylines() {
        let lines = [Polyline { comments: vec!["a".into()], points: vec![Vec3::ZERO, Vec3::X, Vec3::Y], closed: true }];
        let mut buf = Vec::new();
        write_obj_polylines(&lines, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.ends_with("l 1 2 3 1\n"), "{text}");
    }
}
