from enum import Enum


class Strategy(str, Enum):
    PRETRAIN  = "pretrain"   # auxiliary corpora only
    CONCAT    = "concat"     # main or auxiliary with probability 0.5
    ANNEALING = "annealing"  # main-corpus ratio rises linearly to 1
    MAIN      = "main"       # main corpus only (plain training / fine-tuning)


MAIN_STRATEGIES = (Strategy.CONCAT, Strategy.ANNEALING, Strategy.MAIN)
