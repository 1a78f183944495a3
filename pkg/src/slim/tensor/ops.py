"""Operações de rede neural sobre `Tensor`, cada uma com seu backward analítico.

Todas as operações são sem viés (bias): convoluções e camadas densas usam apenas
os pesos. Convolução e pooling usam janelas deslizantes (im2col) do NumPy.
"""

from __future__ import annotations


import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from slim.errors import DimensionError, LabelError
from slim.tensor.tensor import Tensor

BN_EPSILON: float = 1e-5
BN_MOMENTUM: float = 0.1


def _require_ndim(op: str, name: str, tensor: Tensor, ndims: tuple[int, ...]) -> None:
    if tensor.ndim not in ndims:
        expected = " ou ".join(str(n) for n in ndims)
        raise DimensionError(op, f"ndim({name})", expected, tensor.ndim)


def _channel_shape(ndim: int, channels: int) -> tuple[int, ...]:
    return (1, channels) + (1,) * (ndim - 2)


def _reduce_axes(ndim: int) -> tuple[int, ...]:
    return (0,) + tuple(range(2, ndim))


# --- Camadas com pesos ---


def conv2d(
    input: Tensor,
    weight: Tensor,
    stride: int = 1,
    padding: int = 0,
) -> Tensor:
    """Correlação cruzada 2D sem viés.

    Args:
        input (Tensor): Entrada `[N, Cin, H, W]`.
        weight (Tensor): Pesos `[Cout, Cin, kh, kw]`.
        stride (int): Passo da janela.
        padding (int): Zeros adicionados em cada borda espacial.

    Returns:
        Tensor: Saída `[N, Cout, H', W']`, com
            `H' = (H + 2·padding − kh) // stride + 1`.

    Raises:
        DimensionError: Se `Cin` divergir ou a janela não couber na entrada.
        ValueError: Se `stride < 1` ou `padding < 0`.
    """
    _require_ndim("conv2d", "input", input, (4,))
    _require_ndim("conv2d", "weight", weight, (4,))
    if stride < 1 or padding < 0:
        raise ValueError(f"conv2d: stride={stride} e padding={padding} inválidos")

    x, w = input.data, weight.data
    n, cin, h, wd = x.shape
    cout, wcin, kh, kw = w.shape
    if wcin != cin:
        raise DimensionError("conv2d", "Cin", wcin, cin)

    if h + 2 * padding < kh:
        raise DimensionError("conv2d", "H", f">= {kh - 2 * padding}", h)

    if wd + 2 * padding < kw:
        raise DimensionError("conv2d", "W", f">= {kw - 2 * padding}", wd)

    ho = (h + 2 * padding - kh) // stride + 1
    wo = (wd + 2 * padding - kw) // stride + 1

    pad = ((0, 0), (0, 0), (padding, padding), (padding, padding))
    xp = np.pad(x, pad) if padding else x
    windows = sliding_window_view(xp, (kh, kw), axis=(2, 3))
    windows = windows[:, :, ::stride, ::stride][:, :, :ho, :wo]
    cols = windows.transpose(0, 2, 3, 1, 4, 5).reshape(n * ho * wo, cin * kh * kw)
    wmat = w.reshape(cout, cin * kh * kw)
    out = (cols @ wmat.T).reshape(n, ho, wo, cout).transpose(0, 3, 1, 2)

    def backward(grad: np.ndarray) -> None:
        gmat = grad.transpose(0, 2, 3, 1).reshape(n * ho * wo, cout)
        if weight.requires_grad:
            weight.accumulate((gmat.T @ cols).reshape(w.shape))

        if input.requires_grad:
            dcols = (gmat @ wmat).reshape(n, ho, wo, cin, kh, kw)
            dxp = np.zeros_like(xp)
            for i in range(kh):
                for j in range(kw):
                    dxp[
                        :, :, i : i + stride * ho : stride, j : j + stride * wo : stride
                    ] += dcols[:, :, :, :, i, j].transpose(0, 3, 1, 2)

            input.accumulate(dxp[:, :, padding : padding + h, padding : padding + wd])

    return Tensor.from_op(
        np.ascontiguousarray(out), (input, weight), backward, "conv2d"
    )


def linear(input: Tensor, weight: Tensor) -> Tensor:
    """Camada densa sem viés: `input · weightᵀ`.

    Args:
        input (Tensor): Entrada `[N, F]`.
        weight (Tensor): Pesos `[O, F]`.

    Returns:
        Tensor: Saída `[N, O]`.

    Raises:
        DimensionError: Se as dimensões internas divergirem.
    """
    _require_ndim("linear", "input", input, (2,))
    _require_ndim("linear", "weight", weight, (2,))
    if input.shape[1] != weight.shape[1]:
        raise DimensionError("linear", "F", weight.shape[1], input.shape[1])

    x, w = input.data, weight.data

    def backward(grad: np.ndarray) -> None:
        if weight.requires_grad:
            weight.accumulate(grad.T @ x)

        if input.requires_grad:
            input.accumulate(grad @ w)

    return Tensor.from_op(x @ w.T, (input, weight), backward, "linear")


def batch_norm(
    input: Tensor,
    gamma: Tensor,
    beta: Tensor,
    running_mean: np.ndarray,
    running_var: np.ndarray,
    *,
    training: bool,
    momentum: float = BN_MOMENTUM,
    epsilon: float = BN_EPSILON,
) -> Tensor:
    """Normalização em lote por canal seguida do afim `γ·x̂ + β`.

    No modo de treino usa as estatísticas do lote e atualiza `running_mean` e
    `running_var` (in-place) por média móvel exponencial; a variância móvel usa o
    estimador não viesado. No modo de avaliação usa as estatísticas móveis como
    estão.

    Args:
        input (Tensor): Entrada `[N, C, H, W]` ou `[N, C]`.
        gamma (Tensor): Escala `[C]`.
        beta (Tensor): Deslocamento `[C]`.
        running_mean (np.ndarray): Média móvel `[C]`, atualizada in-place.
        running_var (np.ndarray): Variância móvel `[C]`, atualizada in-place.
        training (bool): Modo de treino.
        momentum (float): Peso da observação nova na média móvel.
        epsilon (float): Termo de estabilidade, estritamente positivo.

    Returns:
        Tensor: Saída no mesmo formato da entrada.

    Raises:
        DimensionError: Se `C` divergir entre entrada e parâmetros.
        ValueError: Se `epsilon <= 0`.
    """
    _require_ndim("batch_norm", "input", input, (2, 4))
    if epsilon <= 0:
        raise ValueError(f"batch_norm: epsilon={epsilon} deve ser positivo")

    channels = input.shape[1]
    for name, size in (
        ("gamma", gamma.size),
        ("beta", beta.size),
        ("running_mean", running_mean.size),
        ("running_var", running_var.size),
    ):
        if size != channels:
            raise DimensionError("batch_norm", f"C({name})", channels, size)

    x = input.data
    axes = _reduce_axes(x.ndim)
    bshape = _channel_shape(x.ndim, channels)
    count = x.size // channels

    if training:
        mean = x.mean(axis=axes)
        var = x.var(axis=axes)
        unbiased = var * (count / max(count - 1, 1))
        running_mean *= 1.0 - momentum
        running_mean += momentum * mean
        running_var *= 1.0 - momentum
        running_var += momentum * unbiased

    else:
        mean, var = running_mean, running_var

    inv_std = (1.0 / np.sqrt(var + epsilon)).astype(x.dtype).reshape(bshape)
    xhat = (x - mean.astype(x.dtype).reshape(bshape)) * inv_std
    g = gamma.data.astype(x.dtype).reshape(bshape)
    out = g * xhat + beta.data.astype(x.dtype).reshape(bshape)

    def backward(grad: np.ndarray) -> None:
        if gamma.requires_grad:
            gamma.accumulate((grad * xhat).sum(axis=axes).astype(gamma.dtype))

        if beta.requires_grad:
            beta.accumulate(grad.sum(axis=axes).astype(beta.dtype))

        if input.requires_grad:
            dxhat = grad * g
            if training:
                dx = (inv_std / count) * (
                    count * dxhat
                    - dxhat.sum(axis=axes, keepdims=True)
                    - xhat * (dxhat * xhat).sum(axis=axes, keepdims=True)
                )

            else:
                dx = dxhat * inv_std

            input.accumulate(dx)

    return Tensor.from_op(out, (input, gamma, beta), backward, "batch_norm")


# --- Porta exponencial ---


def exp_gate(input: Tensor, g: Tensor) -> Tensor:
    """Multiplica cada canal `k` por `1 − e^{−g_k²}`.

    Args:
        input (Tensor): Entrada `[N, C, ...]`.
        g (Tensor): Parâmetros de porta `[C]`.

    Returns:
        Tensor: Saída no mesmo formato da entrada.

    Raises:
        DimensionError: Se o eixo de canais divergir de `g`.
    """
    if input.ndim < 2:
        raise DimensionError("exp_gate", "ndim(input)", ">= 2", input.ndim)

    channels = input.shape[1]
    if g.ndim != 1 or g.size != channels:
        raise DimensionError("exp_gate", "C", channels, g.shape)

    x = input.data
    gv = g.data.astype(x.dtype)
    bshape = _channel_shape(x.ndim, channels)
    factor = (1 - np.exp(-gv * gv)).reshape(bshape)
    axes = _reduce_axes(x.ndim)

    def backward(grad: np.ndarray) -> None:
        if input.requires_grad:
            input.accumulate(grad * factor)

        if g.requires_grad:
            chain = 2.0 * gv * np.exp(-gv * gv)
            g.accumulate(((grad * x).sum(axis=axes) * chain).astype(g.dtype))

    return Tensor.from_op(x * factor, (input, g), backward, "exp_gate")


# --- Operações auxiliares ---


def relu(input: Tensor) -> Tensor:
    """Retificação `max(x, 0)`; `nan` se propaga."""
    x = input.data
    mask = x > 0

    def backward(grad: np.ndarray) -> None:
        input.accumulate(grad * mask)

    return Tensor.from_op(np.maximum(x, 0).astype(x.dtype), (input,), backward, "relu")


def max_pool2d(input: Tensor, kernel: int = 2, stride: int | None = None) -> Tensor:
    """Máximo em janelas espaciais `kernel × kernel`.

    Args:
        input (Tensor): Entrada `[N, C, H, W]`.
        kernel (int): Lado da janela.
        stride (int | None): Passo; igual ao `kernel` se `None`.

    Returns:
        Tensor: Saída `[N, C, H', W']`.

    Raises:
        DimensionError: Se a janela não couber na entrada.
    """
    _require_ndim("max_pool2d", "input", input, (4,))
    stride = kernel if stride is None else stride
    x = input.data
    n, c, h, w = x.shape
    if h < kernel or w < kernel:
        raise DimensionError("max_pool2d", "H×W", f">= {kernel}", (h, w))

    ho = (h - kernel) // stride + 1
    wo = (w - kernel) // stride + 1
    windows = sliding_window_view(x, (kernel, kernel), axis=(2, 3))
    windows = windows[:, :, ::stride, ::stride][:, :, :ho, :wo]
    flat = windows.reshape(n, c, ho, wo, kernel * kernel)
    arg = flat.argmax(axis=-1)
    out = np.take_along_axis(flat, arg[..., None], axis=-1)[..., 0]

    def backward(grad: np.ndarray) -> None:
        dx = np.zeros_like(x)
        for i in range(kernel):
            for j in range(kernel):
                hit = arg == i * kernel + j
                rows = slice(i, i + stride * ho, stride)
                cols = slice(j, j + stride * wo, stride)
                dx[:, :, rows, cols] += grad * hit

        input.accumulate(dx)

    return Tensor.from_op(np.ascontiguousarray(out), (input,), backward, "max_pool2d")


def global_avg_pool(input: Tensor) -> Tensor:
    """Média espacial por canal: `[N, C, H, W] → [N, C]`."""
    _require_ndim("global_avg_pool", "input", input, (4,))
    x = input.data
    area = x.shape[2] * x.shape[3]

    def backward(grad: np.ndarray) -> None:
        input.accumulate(
            np.broadcast_to(grad[:, :, None, None] / area, x.shape).astype(x.dtype)
        )

    return Tensor.from_op(x.mean(axis=(2, 3)), (input,), backward, "global_avg_pool")


def flatten(input: Tensor) -> Tensor:
    """Achata todos os eixos após o lote: `[N, ...] → [N, F]`."""
    return input.reshape(input.shape[0], -1)


def select(input: Tensor, indices: np.ndarray) -> Tensor:
    """Seleciona colunas de uma entrada `[N, F]` (índices sem repetição).

    Args:
        input (Tensor): Entrada `[N, F]`.
        indices (np.ndarray): Colunas mantidas, em ordem.

    Returns:
        Tensor: Saída `[N, len(indices)]`.
    """
    _require_ndim("select", "input", input, (2,))
    x = input.data

    def backward(grad: np.ndarray) -> None:
        dx = np.zeros_like(x)
        dx[:, indices] = grad
        input.accumulate(dx)

    return Tensor.from_op(x[:, indices], (input,), backward, "select")


def dropout(
    input: Tensor,
    rate: float,
    *,
    training: bool,
    rng: np.random.Generator,
) -> Tensor:
    """Dropout invertido; identidade fora do modo de treino.

    Args:
        input (Tensor): Entrada de qualquer formato.
        rate (float): Probabilidade de zerar cada elemento, em `[0, 1)`.
        training (bool): Modo de treino.
        rng (np.random.Generator): Gerador semeado.

    Returns:
        Tensor: Saída no mesmo formato.
    """
    if not 0.0 <= rate < 1.0:
        raise ValueError(f"dropout: taxa {rate} fora de [0, 1)")

    if not training or rate == 0.0:
        return input

    x = input.data
    mask = ((rng.random(x.shape) >= rate) / (1.0 - rate)).astype(x.dtype)

    def backward(grad: np.ndarray) -> None:
        input.accumulate(grad * mask)

    return Tensor.from_op(x * mask, (input,), backward, "dropout")


def softmax_cross_entropy(logits: Tensor, labels: np.ndarray) -> Tensor:
    """Entropia cruzada com softmax, média sobre o lote.

    Args:
        logits (Tensor): Logits `[N, K]`.
        labels (np.ndarray): Rótulos inteiros `[N]` em `[0, K)`.

    Returns:
        Tensor: Perda escalar.

    Raises:
        LabelError: Se algum rótulo estiver fora de `[0, K)`.
        DimensionError: Se o número de rótulos divergir do lote.
    """
    _require_ndim("softmax_cross_entropy", "logits", logits, (2,))
    z = logits.data
    n, k = z.shape
    labels = np.asarray(labels).astype(np.int64).reshape(-1)
    if labels.size != n:
        raise DimensionError("softmax_cross_entropy", "N", n, labels.size)

    bad = (labels < 0) | (labels >= k)
    if bad.any():
        raise LabelError(int(labels[bad][0]), k)

    shifted = z - z.max(axis=1, keepdims=True)
    exp = np.exp(shifted)
    total = exp.sum(axis=1, keepdims=True)
    rows = np.arange(n)
    losses = np.log(total[:, 0]) - shifted[rows, labels]

    def backward(grad: np.ndarray) -> None:
        probs = exp / total
        probs[rows, labels] -= 1.0
        logits.accumulate((probs * (grad / n)).astype(z.dtype))

    return Tensor.from_op(
        np.asarray(losses.mean(), dtype=z.dtype), (logits,), backward, "cross_entropy"
    )
