"""Hierarquia de exceções estruturadas do projeto.

Cada exceção guarda, como atributos, os campos citados na mensagem, para que a
CLI possa emitir diagnósticos estruturados sem reinterpretar texto.
"""

from __future__ import annotations


class SlimError(Exception):
    """Raiz de todas as exceções do projeto."""


class DimensionError(SlimError, ValueError):
    """Formatos incompatíveis entre operandos de uma operação de tensor."""

    def __init__(self, op: str, axis: str, expected: object, observed: object) -> None:
        """Inicializa o erro.

        Args:
            op (str): Nome da operação (ex.: `"conv2d"`).
            axis (str): Eixo que causou o erro (ex.: `"Cin"`).
            expected (object): Valor esperado para o eixo.
            observed (object): Valor observado.
        """
        super().__init__(
            f"{op}: dimensão incompatível no eixo {axis} "
            f"(esperado={expected}, observado={observed})"
        )
        self.op = op
        self.axis = axis
        self.expected = expected
        self.observed = observed


class LabelError(SlimError, ValueError):
    """Rótulo fora do intervalo de classes."""

    def __init__(self, label: int, num_classes: int) -> None:
        """Inicializa o erro.

        Args:
            label (int): Rótulo inválido encontrado.
            num_classes (int): Número de classes dos logits.
        """
        super().__init__(f"Rótulo {label} fora do intervalo [0, {num_classes})")
        self.label = label
        self.num_classes = num_classes


class DeadLayerError(SlimError):
    """Todos os canais de um grupo ficariam abaixo do limiar."""

    def __init__(self, group: str, threshold: float) -> None:
        """Inicializa o erro.

        Args:
            group (str): Nome do grupo podável.
            threshold (float): Limiar usado na seleção.
        """
        super().__init__(
            f"Camada morta: o grupo {group!r} perde todos os canais "
            f"no limiar {threshold:g}"
        )
        self.group = group
        self.threshold = threshold


class SelectionError(SlimError, ValueError):
    """Seleção de canais inconsistente com os formatos atuais da rede."""

    def __init__(self, group: str, reason: str) -> None:
        """Inicializa o erro.

        Args:
            group (str): Nome do grupo afetado.
            reason (str): Descrição da inconsistência.
        """
        super().__init__(f"Seleção inválida para o grupo {group!r}: {reason}")
        self.group = group
        self.reason = reason


class FormatError(SlimError, ValueError):
    """Conteúdo de arquivo com formato inesperado."""

    def __init__(self, what: str, expected: object, observed: object) -> None:
        """Inicializa o erro.

        Args:
            what (str): O que estava sendo lido (ex.: `"IDX magic"`).
            expected (object): Valor esperado.
            observed (object): Valor observado.
        """
        super().__init__(
            f"Formato inválido em {what}: esperado={expected!r}, observado={observed!r}"
        )
        self.what = what
        self.expected = expected
        self.observed = observed


class LengthError(SlimError, ValueError):
    """Arquivo ou bloco com tamanho diferente do declarado."""

    def __init__(self, what: str, expected: int, observed: int) -> None:
        """Inicializa o erro.

        Args:
            what (str): O que estava sendo lido.
            expected (int): Tamanho esperado em bytes.
            observed (int): Tamanho observado em bytes.
        """
        super().__init__(
            f"Tamanho inválido em {what}: esperado={expected} bytes, "
            f"observado={observed} bytes"
        )
        self.what = what
        self.expected = expected
        self.observed = observed


class VersionError(SlimError):
    """Versão de checkpoint não suportada."""

    def __init__(self, expected: int, observed: int) -> None:
        """Inicializa o erro.

        Args:
            expected (int): Versão suportada.
            observed (int): Versão encontrada no arquivo.
        """
        super().__init__(
            f"Versão de checkpoint não suportada: esperado={expected}, "
            f"observado={observed}"
        )
        self.expected = expected
        self.observed = observed


class HashError(SlimError):
    """Resumo SHA-256 de um tensor não confere com o manifesto."""

    def __init__(self, name: str, expected: str, observed: str) -> None:
        """Inicializa o erro.

        Args:
            name (str): Nome do tensor.
            expected (str): Resumo registrado no manifesto.
            observed (str): Resumo calculado sobre os bytes lidos.
        """
        super().__init__(
            f"Resumo inválido para o tensor {name!r}: esperado={expected[:12]}…, "
            f"observado={observed[:12]}…"
        )
        self.name = name
        self.expected = expected
        self.observed = observed


class NonFiniteLossError(SlimError):
    """Perda não finita durante o treino."""

    def __init__(
        self, epoch: int, batch: int, lr: float, lambda1: float, sigma: float
    ) -> None:
        """Inicializa o erro.

        Args:
            epoch (int): Época em que a perda divergiu.
            batch (int): Índice do lote.
            lr (float): Última taxa de aprendizado.
            lambda1 (float): Força de esparsidade vigente.
            sigma (float): σ vigente.
        """
        super().__init__(
            f"Perda não finita na época {epoch}, lote {batch} "
            f"(lr={lr:g}, λ={lambda1:g}, σ={sigma:g})"
        )
        self.epoch = epoch
        self.batch = batch
        self.lr = lr
        self.lambda1 = lambda1
        self.sigma = sigma


class ConfigError(SlimError, ValueError):
    """Chave ou valor de configuração inválido."""

    def __init__(self, key: str, value: object, reason: str) -> None:
        """Inicializa o erro.

        Args:
            key (str): Chave pontuada (ex.: `"regularizer.kind"`).
            value (object): Valor rejeitado.
            reason (str): Motivo da rejeição.
        """
        super().__init__(f"Configuração inválida {key}={value!r}: {reason}")
        self.key = key
        self.value = value
        self.reason = reason
