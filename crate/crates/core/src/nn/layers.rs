//! Convolution kernels.
//!
//! Both layer kinds store their kernel as `[out][in][kh][kw]` followed by
//! `out` biases, and pad with zeros by `k / 2` on each side. A strided
//! convolution of an `H`-row input yields `ceil(H / s)` rows; the transposed
//! convolution is its adjoint and is told which size to restore.

use serde::{Deserialize, Serialize};

use super::tensor::Tensor;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LayerKind {
    InputEmbed,
    Conv,
    TransposedConv,
    OutputHead,
}

impl LayerKind {
    pub fn code(self) -> u8 {
        match self {
            LayerKind::InputEmbed => 0,
            LayerKind::Conv => 1,
            LayerKind::TransposedConv => 2,
            LayerKind::OutputHead => 3,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        Some(match code {
            0 => LayerKind::InputEmbed,
            1 => LayerKind::Conv,
            2 => LayerKind::TransposedConv,
            3 => LayerKind::OutputHead,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerSpec {
    pub kind: LayerKind,
    pub in_channels: usize,
    pub out_channels: usize,
    pub kernel: (usize, usize),
    pub stride: usize,
    pub has_bias: bool,
    /// Earlier layer whose output is added to this layer's input.
    pub skip_source: Option<usize>,
    /// Whether the input embedding is stacked onto this layer's input as an
    /// extra channel (already counted in `in_channels`).
    pub stacks_input: bool,
}

impl LayerSpec {
    pub fn conv(in_channels: usize, out_channels: usize, stride: usize) -> Self {
        Self {
            kind: LayerKind::Conv,
            in_channels,
            out_channels,
            kernel: (3, 3),
            stride,
            has_bias: true,
            skip_source: None,
            stacks_input: false,
        }
    }

    pub fn transposed(in_channels: usize, out_channels: usize, stride: usize) -> Self {
        Self {
            kind: LayerKind::TransposedConv,
            ..Self::conv(in_channels, out_channels, stride)
        }
    }

    pub fn kernel_len(&self) -> usize {
        self.out_channels * self.in_channels * self.kernel.0 * self.kernel.1
    }

    /// Kernel weights plus biases.
    pub fn param_len(&self) -> usize {
        self.kernel_len() + if self.has_bias { self.out_channels } else { 0 }
    }
}

/// A layer description with its parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct Layer {
    pub spec: LayerSpec,
    pub params: Vec<f32>,
}

impl Layer {
    pub fn new(spec: LayerSpec, params: Vec<f32>) -> Result<Self> {
        if params.len() != spec.param_len() {
            return Err(Error::Shape(format!(
                "layer expects {} parameters, got {}",
                spec.param_len(),
                params.len()
            )));
        }
        Ok(Self { spec, params })
    }

    pub fn zeros(spec: LayerSpec) -> Self {
        let params = vec![0.0; spec.param_len()];
        Self { spec, params }
    }

    pub fn kernel(&self) -> &[f32] {
        &self.params[..self.spec.kernel_len()]
    }

    pub fn bias(&self) -> Option<&[f32]> {
        self.spec.has_bias.then(|| &self.params[self.spec.kernel_len()..])
    }

    fn weight(&self, o: usize, c: usize, ky: usize, kx: usize) -> f32 {
        let (kh, kw) = self.spec.kernel;
        self.params[((o * self.spec.in_channels + c) * kh + ky) * kw + kx]
    }

    fn check_input(&self, input: &Tensor) -> Result<()> {
        if input.channels != self.spec.in_channels {
            return Err(Error::Shape(format!(
                "layer takes {} channels, input has {}",
                self.spec.in_channels, input.channels
            )));
        }
        if self.spec.stride == 0 {
            return Err(Error::Shape("stride must be positive".into()));
        }
        Ok(())
    }

    fn init_bias(&self, out: &mut Tensor) {
        if let Some(bias) = self.bias() {
            let n = out.height * out.width;
            for (o, b) in bias.iter().enumerate() {
                out.data[o * n..(o + 1) * n].fill(*b);
            }
        }
    }
}

/// Valid output indices `y` for kernel offset `k` so that the source index
/// `y * stride + k - pad` stays inside `[0, n)`.
fn conv_range(out_len: usize, n: usize, stride: usize, k: usize, pad: usize) -> std::ops::Range<usize> {
    // y * stride + k >= pad
    let lo = pad.saturating_sub(k).div_ceil(stride);
    // y * stride + k - pad <= n - 1
    let hi = if n + pad > k { (n + pad - k - 1) / stride + 1 } else { 0 };
    lo..hi.min(out_len).max(lo)
}

/// Zero-padded "same" cross-correlation.
pub fn conv2d(input: &Tensor, layer: &Layer) -> Result<Tensor> {
    layer.check_input(input)?;
    let s = &layer.spec;
    let (kh, kw) = s.kernel;
    let (ph, pw) = (kh / 2, kw / 2);
    let out_h = input.height.div_ceil(s.stride);
    let out_w = input.width.div_ceil(s.stride);
    let mut out = Tensor::zeros(s.out_channels, out_h, out_w);
    layer.init_bias(&mut out);
    for o in 0..s.out_channels {
        for c in 0..s.in_channels {
            let src = input.plane(c);
            for ky in 0..kh {
                let ys = conv_range(out_h, input.height, s.stride, ky, ph);
                for kx in 0..kw {
                    let w = layer.weight(o, c, ky, kx);
                    if w == 0.0 {
                        continue;
                    }
                    let xs = conv_range(out_w, input.width, s.stride, kx, pw);
                    for y in ys.clone() {
                        let sy = y * s.stride + ky - ph;
                        let row = &src[sy * input.width..(sy + 1) * input.width];
                        let dst = &mut out.data[(o * out_h + y) * out_w..(o * out_h + y + 1) * out_w];
                        for x in xs.clone() {
                            dst[x] += w * row[x * s.stride + kx - pw];
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Fractionally strided convolution restoring an `out_dims` map. `out_dims`
/// must be a size that a strided convolution would shrink to the input size.
pub fn transposed_conv2d(input: &Tensor, layer: &Layer, out_dims: (usize, usize)) -> Result<Tensor> {
    layer.check_input(input)?;
    let s = &layer.spec;
    let (out_h, out_w) = out_dims;
    if out_h.div_ceil(s.stride) != input.height || out_w.div_ceil(s.stride) != input.width {
        return Err(Error::Shape(format!(
            "cannot restore {out_h}x{out_w} from {}x{} at stride {}",
            input.height, input.width, s.stride
        )));
    }
    let (kh, kw) = s.kernel;
    let (ph, pw) = (kh / 2, kw / 2);
    let mut out = Tensor::zeros(s.out_channels, out_h, out_w);
    layer.init_bias(&mut out);
    for o in 0..s.out_channels {
        for c in 0..s.in_channels {
            let src = input.plane(c);
            for ky in 0..kh {
                let ys = conv_range(input.height, out_h, s.stride, ky, ph);
                for kx in 0..kw {
                    let w = layer.weight(o, c, ky, kx);
                    if w == 0.0 {
                        continue;
                    }
                    let xs = conv_range(input.width, out_w, s.stride, kx, pw);
                    for i in ys.clone() {
                        let ty = i * s.stride + ky - ph;
                        let row = &src[i * input.width..(i + 1) * input.width];
                        let base = (o * out_h + ty) * out_w;
                        for j in xs.clone() {
                            out.data[base + j * s.stride + kx - pw] += w * row[j];
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}
