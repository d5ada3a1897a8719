use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use crate::degree::DegreeDistribution;
use crate::error::{Error, Result};

/// `degree,count` with LF endings; only degrees that occur.
pub fn write_degree_csv<W: Write>(dist: &DegreeDistribution, w: W) -> std::io::Result<()> {
    let mut out = ::csv::WriterBuilder::new()
        .terminator(::csv::Terminator::Any(b'\n'))
        .from_writer(w);
    out.write_record(["degree", "count"])?;
    for (&k, &c) in dist.counts.iter().filter(|(_, &c)| c > 0) {
        out.serialize((k, c))?;
    }
    out.flush()
}

pub fn export_degree_csv(dist: &DegreeDistribution, path: impl AsRef<Path>) -> Result<()> {
    super::write_to_path(path.as_ref(), |w| write_degree_csv(dist, w))
}

pub fn read_degree_csv(path: impl AsRef<Path>) -> Result<BTreeMap<u64, u64>> {
    let path = path.as_ref();
    let mut rdr = ::csv::Reader::from_path(path)
        .map_err(|e| Error::format("CSV", format!("{}: {e}", path.display())))?;
    let mut counts = BTreeMap::new();
    for row in rdr.deserialize::<(u64, u64)>() {
        let (k, c) = row.map_err(|e| Error::format("CSV", e.to_string()))?;
        if counts.insert(k, c).is_some() {
            return Err(Error::format("CSV", format!("degree {k} listed twice")));
        }
    }
    Ok(counts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout() {
        let dist = DegreeDistribution::from_in_degrees(2, &[2, 0, 1, 0, 2]);
        let mut buf = Vec::new();
        write_degree_csv(&dist, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "degree,count\n0,2\n1,1\n2,2\n"
        );
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("deg.csv");
        let dist = DegreeDistribution::from_in_degrees(3, &[0, 0, 4, 1, 1, 0, 3, 0, 0]);
        export_degree_csv(&dist, &path).unwrap();
        assert_eq!(read_degree_csv(&path).unwrap(), dist.counts);
    }
}
