"""Treinamento esparso com portas por canal e poda estrutural de redes convolucionais.

Implementa a norma bounded-ℓp,0 como regularizador e como camada de portas
exponenciais, poda os canais zerados e compacta os tensores de peso.
"""

from __future__ import annotations


__version__ = "0.1.0"
