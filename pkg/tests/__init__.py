# g2cert tests
