name = "qentropy"
