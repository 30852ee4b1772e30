//! Checkpoint container: little-endian binary, magic `RLCK`, version,
//! hyperparameters, f64 weights, scaler, cluster model, training history,
//! trailing CRC32.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use ndarray::{Array1, Array2};

use super::{Checkpoint, EpochStats, LstmLayerParams, ModelParams, TrainConfig};
use crate::binio::{self, CrcReader, CrcWriter};
use crate::dataset;
use crate::error::{Error, Result};

pub const CHECKPOINT_MAGIC: &[u8; 4] = b"RLCK";
pub const CHECKPOINT_VERSION: u16 = 1;

fn write_matrix<W: Write>(w: &mut W, m: &Array2<f64>) -> Result<()> {
    w.write_u32::<LittleEndian>(m.nrows() as u32)?;
    w.write_u32::<LittleEndian>(m.ncols() as u32)?;
    for &v in m.iter() {
        w.write_f64::<LittleEndian>(v)?;
    }
    Ok(())
}

fn read_matrix<R: Read>(r: &mut R) -> Result<Array2<f64>> {
    let rows = r.read_u32::<LittleEndian>()? as usize;
    let cols = r.read_u32::<LittleEndian>()? as usize;
    let mut data = Vec::with_capacity(rows * cols);
    for _ in 0..rows * cols {
        data.push(r.read_f64::<LittleEndian>()?);
    }
    Array2::from_shape_vec((rows, cols), data)
        .map_err(|e| Error::Format(format!("bad matrix shape: {e}")))
}

fn write_vector<W: Write>(w: &mut W, v: &Array1<f64>) -> Result<()> {
    binio::write_f64_slice(w, v.as_slice().expect("contiguous vector"))
}

fn read_vector<R: Read>(r: &mut R) -> Result<Array1<f64>> {
    Ok(Array1::from_vec(binio::read_f64_slice(r)?))
}

/// Writes the `RLCK` container.
pub fn save_checkpoint<P: AsRef<Path>>(checkpoint: &Checkpoint, path: P) -> Result<()> {
    let file = File::create(path)?;
    let mut w = CrcWriter::new(BufWriter::new(file));
    binio::write_magic(&mut w, CHECKPOINT_MAGIC, CHECKPOINT_VERSION)?;

    let params = &checkpoint.params;
    w.write_u32::<LittleEndian>(params.input_dim as u32)?;
    w.write_u32::<LittleEndian>(params.width as u32)?;
    w.write_u32::<LittleEndian>(params.seq_len as u32)?;
    w.write_u32::<LittleEndian>(params.num_layers() as u32)?;
    for layer in &params.layers {
        for m in [&layer.w_i, &layer.w_f, &layer.w_o, &layer.w_c] {
            write_matrix(&mut w, m)?;
        }
        for b in [&layer.b_i, &layer.b_f, &layer.b_o, &layer.b_c] {
            write_vector(&mut w, b)?;
        }
    }
    write_vector(&mut w, &params.dense_w)?;
    w.write_f64::<LittleEndian>(params.dense_b)?;

    dataset::write_scaler(&mut w, &checkpoint.scaler)?;
    dataset::write_cluster(&mut w, &checkpoint.cluster_model)?;

    let config = &checkpoint.config;
    w.write_u32::<LittleEndian>(config.epochs as u32)?;
    w.write_f64::<LittleEndian>(config.learning_rate)?;
    w.write_u32::<LittleEndian>(config.batch_size as u32)?;
    w.write_f64::<LittleEndian>(config.dropout)?;
    w.write_u64::<LittleEndian>(config.seed)?;
    w.write_u32::<LittleEndian>(config.patience as u32)?;
    w.write_u32::<LittleEndian>(config.width as u32)?;
    w.write_u32::<LittleEndian>(config.layers as u32)?;

    w.write_u32::<LittleEndian>(checkpoint.history.len() as u32)?;
    for row in &checkpoint.history {
        w.write_u32::<LittleEndian>(row.epoch as u32)?;
        w.write_f64::<LittleEndian>(row.train_mse)?;
        w.write_f64::<LittleEndian>(row.val_mse)?;
    }
    w.finish()
}

/// Reads an `RLCK` container, verifying version and checksum.
pub fn load_checkpoint<P: AsRef<Path>>(path: P) -> Result<Checkpoint> {
    let file = File::open(path)?;
    let mut r = CrcReader::new(BufReader::new(file));
    binio::read_magic(&mut r, CHECKPOINT_MAGIC, CHECKPOINT_VERSION)?;

    let input_dim = r.read_u32::<LittleEndian>()? as usize;
    let width = r.read_u32::<LittleEndian>()? as usize;
    let seq_len = r.read_u32::<LittleEndian>()? as usize;
    let num_layers = r.read_u32::<LittleEndian>()? as usize;
    let mut layers = Vec::with_capacity(num_layers);
    for _ in 0..num_layers {
        let w_i = read_matrix(&mut r)?;
        let w_f = read_matrix(&mut r)?;
        let w_o = read_matrix(&mut r)?;
        let w_c = read_matrix(&mut r)?;
        let b_i = read_vector(&mut r)?;
        let b_f = read_vector(&mut r)?;
        let b_o = read_vector(&mut r)?;
        let b_c = read_vector(&mut r)?;
        layers.push(LstmLayerParams {
            w_i,
            w_f,
            w_o,
            w_c,
            b_i,
            b_f,
            b_o,
            b_c,
        });
    }
    let dense_w = read_vector(&mut r)?;
    let dense_b = r.read_f64::<LittleEndian>()?;
    let params = ModelParams {
        layers,
        dense_w,
        dense_b,
        width,
        seq_len,
        input_dim,
    };

    let scaler = dataset::read_scaler(&mut r)?;
    let cluster_model = dataset::read_cluster(&mut r)?;

    let config = TrainConfig {
        epochs: r.read_u32::<LittleEndian>()? as usize,
        learning_rate: r.read_f64::<LittleEndian>()?,
        batch_size: r.read_u32::<LittleEndian>()? as usize,
        dropout: r.read_f64::<LittleEndian>()?,
        seed: r.read_u64::<LittleEndian>()?,
        patience: r.read_u32::<LittleEndian>()? as usize,
        width: r.read_u32::<LittleEndian>()? as usize,
        layers: r.read_u32::<LittleEndian>()? as usize,
    };

    let n = r.read_u32::<LittleEndian>()? as usize;
    let mut history = Vec::with_capacity(n);
    for _ in 0..n {
        history.push(EpochStats {
            epoch: r.read_u32::<LittleEndian>()? as usize,
            train_mse: r.read_f64::<LittleEndian>()?,
            val_mse: r.read_f64::<LittleEndian>()?,
        });
    }
    r.verify()?;
    Ok(Checkpoint {
        params,
        scaler,
        cluster_model,
        config,
        history,
    })
}
