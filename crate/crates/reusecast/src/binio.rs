//! Little-endian binary containers with a magic header, a format version,
//! and a trailing CRC32 over everything that precedes it.

use std::io::{Read, Write};

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};

use crate::error::{Error, Result};

/// Accumulates a CRC32 over all bytes written through it.
pub struct CrcWriter<W: Write> {
    inner: W,
    hasher: crc32fast::Hasher,
}

impl<W: Write> CrcWriter<W> {
    pub fn new(inner: W) -> Self {
        CrcWriter {
            inner,
            hasher: crc32fast::Hasher::new(),
        }
    }

    /// Writes the accumulated CRC32 (not itself checksummed) and flushes.
    pub fn finish(mut self) -> Result<()> {
        let crc = self.hasher.finalize();
        self.inner.write_u32::<LittleEndian>(crc)?;
        self.inner.flush()?;
        Ok(())
    }
}

impl<W: Write> Write for CrcWriter<W> {
    fn write(&mut self, buf: &[u8]) -> std::io::Result<usize> {
        let n = self.inner.write(buf)?;
        self.hasher.update(&buf[..n]);
        Ok(n)
    }

    fn flush(&mut self) -> std::io::Result<()> {
        self.inner.flush()
    }
}

/// Verifies the trailing CRC32 over all bytes read through it.
pub struct CrcReader<R: Read> {
    inner: R,
    hasher: crc32fast::Hasher,
}

impl<R: Read> CrcReader<R> {
    pub fn new(inner: R) -> Self {
        CrcReader {
            inner,
            hasher: crc32fast::Hasher::new(),
        }
    }

    /// Reads the stored CRC32 and compares it with the computed one.
    pub fn verify(mut self) -> Result<()> {
        let computed = self.hasher.clone().finalize();
        let stored = self
            .inner
            .read_u32::<LittleEndian>()
            .map_err(|_| Error::Format("missing checksum (file truncated?)".into()))?;
        if stored != computed {
            return Err(Error::Checksum { stored, computed });
        }
        Ok(())
    }
}

impl<R: Read> Read for CrcReader<R> {
    fn read(&mut self, buf: &mut [u8]) -> std::io::Result<usize> {
        let n = self.inner.read(buf)?;
        self.hasher.update(&buf[..n]);
        Ok(n)
    }
}

pub fn write_magic<W: Write>(w: &mut W, magic: &[u8; 4], version: u16) -> Result<()> {
    w.write_all(magic)?;
    w.write_u16::<LittleEndian>(version)?;
    Ok(())
}

pub fn read_magic<R: Read>(r: &mut R, magic: &[u8; 4], version: u16) -> Result<()> {
    let mut found = [0u8; 4];
    r.read_exact(&mut found)
        .map_err(|_| Error::Format("file too short for magic".into()))?;
    if &found != magic {
        return Err(Error::Format(format!(
            "bad magic {:?}, expected {:?}",
            String::from_utf8_lossy(&found),
            String::from_utf8_lossy(magic)
        )));
    }
    let got = r.read_u16::<LittleEndian>()?;
    if got != version {
        return Err(Error::Version {
            found: got,
            expected: version,
        });
    }
    Ok(())
}

pub fn write_f64_slice<W: Write>(w: &mut W, values: &[f64]) -> Result<()> {
    w.write_u64::<LittleEndian>(values.len() as u64)?;
    for &v in values {
        w.write_f64::<LittleEndian>(v)?;
    }
    Ok(())
}

pub fn read_f64_slice<R: Read>(r: &mut R) -> Result<Vec<f64>> {
    let n = r.read_u64::<LittleEndian>()? as usize;
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        out.push(r.read_f64::<LittleEndian>()?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use byteorder::{ReadBytesExt, WriteBytesExt};
    use std::io::Cursor;

    #[test]
    fn crc_round_trip_and_corruption() {
        let mut buf = Vec::new();
        {
            let mut w = CrcWriter::new(&mut buf);
            write_magic(&mut w, b"TEST", 1).unwrap();
            w.write_u64::<LittleEndian>(0xDEADBEEF).unwrap();
            w.finish().unwrap();
        }
        {
            let mut r = CrcReader::new(Cursor::new(&buf));
            read_magic(&mut r, b"TEST", 1).unwrap();
            assert_eq!(r.read_u64::<LittleEndian>().unwrap(), 0xDEADBEEF);
            r.verify().unwrap();
        }
        // flip one payload byte -> checksum error
        let mut bad = buf.clone();
        bad[7] ^= 0xFF;
        let mut r = CrcReader::new(Cursor::new(&bad));
        read_magic(&mut r, b"TEST", 1).unwrap();
        let _ = r.read_u64::<LittleEndian>().unwrap();
        assert!(matches!(r.verify(), Err(Error::Checksum { .. })));
    }

    #[test]
    fn version_mismatch_is_reported() {
        let mut buf = Vec::new();
        let mut w = CrcWriter::new(&mut buf);
        write_magic(&mut w, b"TEST", 9).unwrap();
        w.finish().unwrap();

        let mut r = CrcReader::new(Cursor::new(&buf));
        match read_magic(&mut r, b"TEST", 1) {
            Err(Error::Version { found, expected }) => {
                assert_eq!((found, expected), (9, 1));
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
