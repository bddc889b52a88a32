# app/config.py
import os
import logging

# ==============================
# CONFIGURAÇÕES (variáveis de ambiente)
# ==============================

def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None or raw == "":
        return default
    try:
        return int(raw)
    except ValueError:
        logging.getLogger("config").warning(f"⚠️ {name}={raw!r} não é inteiro, usando {default}")
        return default


# Número máximo de blow-ups de pontos numa resolução
DEPTH_CAP = _env_int("MLDLAB_DEPTH_CAP", 64)

# Constante do limite de busca padrão 4·maxdeg·(1 + Σλ)
ORACLE_FACTOR = _env_int("MLDLAB_ORACLE_FACTOR", 4)

# Limite de nós do branch and bound exato
NODE_CAP = _env_int("MLDLAB_NODE_CAP", 200000)

# Processos para amostragem dos experimentos (1 = no próprio processo)
WORKERS = _env_int("MLDLAB_WORKERS", 1)

# Maior sequência estritamente crescente tolerada pelo ACC antes do alarme
ACC_ALARM = _env_int("MLDLAB_ACC_ALARM", 8)

LOG_LEVEL = os.environ.get("MLDLAB_LOG_LEVEL", "WARNING").upper()
