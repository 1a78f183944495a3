"""Tensor denso com diferenciação automática em modo reverso."""

from __future__ import annotations


from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np

DEFAULT_DTYPE = np.float32
_FLOAT_DTYPES = (np.dtype(np.float32), np.dtype(np.float64))

BackwardFn = Callable[[np.ndarray], None]


def unbroadcast(grad: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    """Reduz um gradiente difundido (broadcast) de volta ao formato do operando.

    Args:
        grad (np.ndarray): Gradiente no formato da saída.
        shape (tuple[int, ...]): Formato original do operando.

    Returns:
        np.ndarray: Gradiente somado sobre os eixos difundidos.
    """
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)

    for axis, extent in enumerate(shape):
        if extent == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)

    return grad


class Tensor:
    """Tensor denso com buffer de gradiente e registro da operação que o produziu.

    Os dados são float32 por padrão; arrays float64 são preservados como float64,
    o que permite verificar gradientes por diferenças finitas em precisão dupla.
    """

    def __init__(
        self,
        data: object,
        *,
        requires_grad: bool = False,
        name: str | None = None,
        dtype: np.dtype | type | None = None,
    ) -> None:
        """Inicializa o tensor.

        Args:
            data (object): Valores (array, lista ou escalar).
            requires_grad (bool): Se `True`, o tensor recebe gradiente no backward.
            name (str | None): Nome opcional (parâmetros nomeados da rede).
            dtype (np.dtype | type | None): Tipo de ponto flutuante; se `None`,
                preserva float32/float64 e converte o resto para float32.
        """
        array = np.asarray(data)
        if dtype is None:
            dtype = array.dtype if array.dtype in _FLOAT_DTYPES else DEFAULT_DTYPE

        self.data: np.ndarray = np.asarray(array, dtype=dtype)
        self.grad: np.ndarray | None = None
        self.requires_grad = requires_grad
        self.name = name
        self.op = "leaf"
        self._parents: tuple[Tensor, ...] = ()
        self._backward: BackwardFn | None = None

    @classmethod
    def from_op(
        cls,
        data: np.ndarray,
        parents: Sequence[Tensor],
        backward: BackwardFn,
        op: str,
    ) -> Tensor:
        """Cria o resultado de uma operação, ligando-o aos pais se houver gradiente.

        Args:
            data (np.ndarray): Valores calculados no forward.
            parents (Sequence[Tensor]): Operandos da operação.
            backward (BackwardFn): Função que recebe o gradiente da saída e o
                propaga para os pais.
            op (str): Nome da operação, para depuração.

        Returns:
            Tensor: O tensor resultante.
        """
        requires_grad = any(parent.requires_grad for parent in parents)
        out = cls(data, requires_grad=requires_grad, dtype=data.dtype)
        if requires_grad:
            out.op = op
            out._parents = tuple(parents)
            out._backward = backward

        return out

    # --- Propriedades ---

    @property
    def shape(self) -> tuple[int, ...]:
        """Formato do tensor."""
        return self.data.shape

    @property
    def ndim(self) -> int:
        """Número de eixos."""
        return self.data.ndim

    @property
    def size(self) -> int:
        """Número de elementos."""
        return self.data.size

    @property
    def dtype(self) -> np.dtype:
        """Tipo de ponto flutuante dos dados."""
        return self.data.dtype

    def item(self) -> float:
        """Retorna o valor de um tensor com um único elemento."""
        return float(self.data.reshape(-1)[0])

    def numpy(self) -> np.ndarray:
        """Retorna os dados como array NumPy (sem cópia)."""
        return self.data

    def detach(self) -> Tensor:
        """Retorna uma cópia dos dados fora do grafo."""
        return Tensor(self.data.copy(), dtype=self.data.dtype)

    def __repr__(self) -> str:
        label = f", name={self.name!r}" if self.name else ""
        return f"Tensor(shape={self.shape}, dtype={self.dtype}, op={self.op}{label})"

    # --- Gradiente ---

    def accumulate(self, grad: np.ndarray) -> None:
        """Soma uma contribuição ao gradiente do tensor.

        Args:
            grad (np.ndarray): Contribuição no mesmo formato dos dados.
        """
        if not self.requires_grad:
            return

        if grad.shape != self.data.shape:
            raise ValueError(
                f"Gradiente com formato {grad.shape} para tensor {self.data.shape}"
            )

        if self.grad is None:
            self.grad = np.array(grad, dtype=self.data.dtype)

        else:
            self.grad += grad

    def zero_grad(self) -> None:
        """Descarta o gradiente acumulado."""
        self.grad = None

    def backward(self, grad: np.ndarray | None = None) -> None:
        """Executa o backward a partir deste tensor.

        Percorre o grafo em ordem topológica reversa. Todo tensor rastreado do grafo
        termina com gradiente preenchido (possivelmente zero).

        Args:
            grad (np.ndarray | None): Gradiente inicial; se `None`, o tensor deve
                ser escalar e o gradiente inicial é 1.

        Raises:
            ValueError: Se `grad` for omitido para um tensor não escalar.
        """
        if grad is None:
            if self.data.size != 1:
                raise ValueError("backward sem gradiente exige um tensor escalar")
            grad = np.ones_like(self.data)

        graph = Graph.trace(self)
        for node in graph.nodes:
            if node.requires_grad and node.grad is None:
                node.grad = np.zeros_like(node.data)

        self.accumulate(np.asarray(grad, dtype=self.data.dtype))

        for node in reversed(graph.nodes):
            if node._backward is not None and node.grad is not None:
                node._backward(node.grad)

    # --- Aritmética elemento a elemento ---

    def __add__(self, other: Tensor | float) -> Tensor:
        other = _as_tensor(other, self.dtype)

        def backward(grad: np.ndarray) -> None:
            self.accumulate(unbroadcast(grad, self.shape))
            other.accumulate(unbroadcast(grad, other.shape))

        return Tensor.from_op(self.data + other.data, (self, other), backward, "add")

    def __radd__(self, other: float) -> Tensor:
        return self + other

    def __mul__(self, other: Tensor | float) -> Tensor:
        other = _as_tensor(other, self.dtype)

        def backward(grad: np.ndarray) -> None:
            self.accumulate(unbroadcast(grad * other.data, self.shape))
            other.accumulate(unbroadcast(grad * self.data, other.shape))

        return Tensor.from_op(self.data * other.data, (self, other), backward, "mul")

    def __rmul__(self, other: float) -> Tensor:
        return self * other

    def __neg__(self) -> Tensor:
        return self * -1.0

    def __sub__(self, other: Tensor | float) -> Tensor:
        return self + (-_as_tensor(other, self.dtype))

    def __rsub__(self, other: float) -> Tensor:
        return _as_tensor(other, self.dtype) + (-self)

    def sum(self) -> Tensor:
        """Soma de todos os elementos."""

        def backward(grad: np.ndarray) -> None:
            self.accumulate(np.broadcast_to(grad, self.shape))

        return Tensor.from_op(
            np.asarray(self.data.sum(), dtype=self.dtype), (self,), backward, "sum"
        )

    def mean(self) -> Tensor:
        """Média de todos os elementos."""
        return self.sum() * (1.0 / self.size)

    def reshape(self, *shape: int) -> Tensor:
        """Retorna uma visão com outro formato e mesmo número de elementos."""
        original = self.shape

        def backward(grad: np.ndarray) -> None:
            self.accumulate(grad.reshape(original))

        return Tensor.from_op(self.data.reshape(shape), (self,), backward, "reshape")


def _as_tensor(value: Tensor | float, dtype: np.dtype) -> Tensor:
    if isinstance(value, Tensor):
        return value

    return Tensor(np.asarray(value, dtype=dtype), dtype=dtype)


@dataclass
class Graph:
    """Registro das operações executadas em ordem topológica (pais antes)."""

    nodes: list[Tensor]

    @classmethod
    def trace(cls, root: Tensor) -> Graph:
        """Percorre os pais a partir da raiz e monta a ordem topológica.

        Usa uma pilha explícita para não estourar a recursão em grafos longos.

        Args:
            root (Tensor): Tensor de saída (normalmente a perda).

        Returns:
            Graph: O grafo com os nós em ordem topológica.
        """
        order: list[Tensor] = []
        visited: set[int] = set()
        stack: list[tuple[Tensor, bool]] = [(root, False)]

        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
                continue

            if id(node) in visited:
                continue

            visited.add(id(node))
            stack.append((node, True))
            for parent in node._parents:
                if id(parent) not in visited:
                    stack.append((parent, False))

        return cls(order)
